//! Weights, tile-partitions and weight-level contraction.
//!
//! A weight of length `n` is a row of `v` (down) and `^` (up) labels. Position `j`
//! (0-based) sits at x-coordinate `j + 1/2`; the textual form lists labels from
//! left to right.
//!
//! # Tile-partition convention
//!
//! Tiles `[r, c]` with `1 <= c <= r <= n - 1` are drawn Russian style with centre
//! `(r - c, r + c)`. Reading labels `n-1, ..., 1` from the corner `(n - 1, n)`, an up
//! label steps north-west and a down label south-west. A tile belongs to the partition
//! when its top vertex lies on or below this path. Equivalently the column at
//! horizontal position `x` holds as many tiles as there are up labels strictly to
//! the right of position `x`. The label at position 0 is fixed by parity.
//! Partitions are written as row lengths for `r = 1, 2, ...` with trailing zeros dropped.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cups::{cup_diagram, Arc};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Down,
    Up,
}

impl Label {
    pub fn flip(self) -> Label {
        match self {
            Label::Down => Label::Up,
            Label::Up => Label::Down,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Label::Down => 'v',
            Label::Up => '^',
        }
    }
}

/// Ordered lexicographically with `v < ^`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight {
    labels: Vec<Label>,
}

impl Weight {
    /// A weight with an even number of up labels.
    pub fn new(labels: Vec<Label>) -> Result<Self> {
        let w = Weight::with_any_parity(labels)?;
        if !w.is_even() {
            return Err(Error::OddParity(w.to_string()));
        }
        Ok(w)
    }

    /// Skips the parity requirement. Diagram-level code (stacking, surgery) never
    /// looks at parity, so this is enough to build odd-block fixtures.
    pub fn with_any_parity(labels: Vec<Label>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyWeight);
        }
        Ok(Weight { labels })
    }

    pub fn parse_any_parity(s: &str) -> Result<Self> {
        let labels = s
            .chars()
            .enumerate()
            .map(|(pos, ch)| match ch {
                'v' | 'V' | '∨' => Ok(Label::Down),
                '^' | '∧' => Ok(Label::Up),
                _ => Err(Error::BadWeightChar { ch, pos }),
            })
            .collect::<Result<Vec<_>>>()?;
        Weight::with_any_parity(labels)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Weight::new(vec![Label::Down; n])
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, j: usize) -> Label {
        self.labels[j]
    }

    pub fn up_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == Label::Up).count()
    }

    pub fn is_even(&self) -> bool {
        self.up_count().is_multiple_of(2)
    }

    /// Flips the labels at positions `a` and `b`.
    pub fn flip_pair(&self, a: usize, b: usize) -> Weight {
        let mut labels = self.labels.clone();
        labels[a] = labels[a].flip();
        labels[b] = labels[b].flip();
        Weight { labels }
    }

    pub(crate) fn from_labels_unchecked(labels: Vec<Label>) -> Weight {
        Weight { labels }
    }
}

impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let w = Weight::parse_any_parity(s)?;
        if !w.is_even() {
            return Err(Error::OddParity(w.to_string()));
        }
        Ok(w)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.labels {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl Serialize for Weight {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Weight::parse_any_parity(&s).map_err(serde::de::Error::custom)
    }
}

/// All `2^(n-1)` weights of length `n`, in lexicographic order with `v < ^`.
pub fn all_weights(n: usize) -> Result<Vec<Weight>> {
    if n == 0 {
        return Err(Error::EmptyWeight);
    }
    assert!(n < 63, "weight enumeration limited to n < 63");
    let out = (0u64..1 << n)
        .filter(|m| m.count_ones() % 2 == 0)
        .map(|m| {
            let labels = (0..n)
                .map(|j| if m >> (n - 1 - j) & 1 == 1 { Label::Up } else { Label::Down })
                .collect();
            Weight { labels }
        })
        .collect();
    Ok(out)
}

/// Row lengths of a tile-partition, trailing zeros removed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TilePartition {
    rows: Vec<usize>,
}

impl TilePartition {
    pub fn new(mut rows: Vec<usize>) -> Self {
        while rows.last() == Some(&0) {
            rows.pop();
        }
        TilePartition { rows }
    }

    pub fn empty() -> Self {
        TilePartition::default()
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    /// Row length for `r >= 1`.
    pub fn row(&self, r: usize) -> usize {
        if r == 0 {
            return 0;
        }
        self.rows.get(r - 1).copied().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        self.rows.iter().sum()
    }

    /// Tiles `[r, c]`, row by row.
    pub fn tiles(&self) -> Vec<(usize, usize)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, &len)| (1..=len).map(move |c| (i + 1, c)))
            .collect()
    }
}

impl fmt::Display for TilePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self.rows.iter().map(|r| r.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for TilePartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        if s.is_empty() || s == "∅" {
            return Ok(TilePartition::empty());
        }
        let rows = s
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|e| Error::Parse(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Ok(TilePartition::new(rows))
    }
}

/// Column heights: `m[x]` = number of up labels strictly right of `x`.
fn column_counts(w: &Weight) -> Vec<usize> {
    let n = w.n();
    let mut m = vec![0; n];
    for x in (0..n.saturating_sub(1)).rev() {
        m[x] = m[x + 1] + usize::from(w.label(x + 1) == Label::Up);
    }
    m
}

pub fn weight_to_partition(w: &Weight) -> TilePartition {
    let n = w.n();
    let m = column_counts(w);
    let rows = (1..n)
        .map(|r| (1..=r).filter(|&c| c <= m[r - c]).count())
        .collect();
    TilePartition::new(rows)
}

pub fn partition_to_weight(p: &TilePartition, n: usize) -> Result<Weight> {
    if n == 0 {
        return Err(Error::EmptyWeight);
    }
    let too_large = || Error::PartitionTooLarge { partition: p.to_string(), n };
    if p.rows().len() > n - 1 {
        return Err(too_large());
    }
    if p.rows().iter().enumerate().any(|(i, &len)| len > i + 1) {
        return Err(too_large());
    }
    // column counts from the tiles [c + x, c]
    let mut m = vec![0usize; n];
    for (r, c) in p.tiles() {
        m[r - c] += 1;
    }
    let mut labels = vec![Label::Down; n];
    for x in 1..n {
        match m[x - 1].checked_sub(m[x]) {
            Some(0) => {}
            Some(1) => labels[x] = Label::Up,
            _ => return Err(Error::UnsupportedTile(p.to_string())),
        }
    }
    if m[n - 1] != 0 {
        return Err(Error::UnsupportedTile(p.to_string()));
    }
    if labels.iter().filter(|&&l| l == Label::Up).count() % 2 == 1 {
        labels[0] = Label::Up;
    }
    let w = Weight { labels };
    // column counts only see the tile multiset; the round trip rejects shapes that
    // are not order ideals
    if weight_to_partition(&w) != *p {
        return Err(Error::UnsupportedTile(p.to_string()));
    }
    Ok(w)
}

/// Tile containment.
pub fn bruhat_leq(a: &TilePartition, b: &TilePartition) -> bool {
    let rows = a.rows().len().max(b.rows().len());
    (1..=rows).all(|r| a.row(r) <= b.row(r))
}

/// The cup removed by contraction at `k`: positions `(k-1, k)` for `k > 0`, `(0, 1)` for `k = 0`.
pub fn contraction_positions(k: usize) -> (usize, usize) {
    if k == 0 {
        (0, 1)
    } else {
        (k - 1, k)
    }
}

/// `k = 0`: decorated cup on positions `(0, 1)`; `k > 0`: undecorated cup on `(k-1, k)`.
pub fn is_contractible(w: &Weight, k: usize) -> bool {
    let (a, b) = contraction_positions(k);
    if b >= w.n() {
        return false;
    }
    let target = Arc::cup(a, b, k == 0);
    cup_diagram(w).arcs().contains(&target)
}

pub fn contractible_positions(w: &Weight) -> Vec<usize> {
    (0..w.n()).filter(|&k| is_contractible(w, k)).collect()
}

/// Deletes the two contracted positions and repairs parity at position 0, without
/// checking contractibility.
pub(crate) fn contract_labels(w: &Weight, k: usize) -> Weight {
    let (a, b) = contraction_positions(k);
    let mut labels: Vec<Label> = w
        .labels()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != a && j != b)
        .map(|(_, &l)| l)
        .collect();
    if labels.iter().filter(|&&l| l == Label::Up).count() % 2 == 1 {
        labels[0] = labels[0].flip();
    }
    Weight { labels }
}

pub fn contract_weight(w: &Weight, k: usize) -> Result<Weight> {
    if w.n() < 3 {
        return Err(Error::ContractionTooSmall(w.n()));
    }
    if !is_contractible(w, k) {
        return Err(Error::NotContractible { weight: w.to_string(), k });
    }
    Ok(contract_labels(w, k))
}
