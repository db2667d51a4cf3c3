//! The generalised arc algebra: oriented circle diagrams, stacked diagrams and the
//! decorated surgery procedure that multiplies them.
//!
//! A stacked diagram has two weight lines. Level 0 carries the first factor's
//! orientation and level 1 the second's. Vertex `[x, y]` is stored as `2x + y`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};
use std::str::FromStr;

use petgraph::unionfind::UnionFind;
use rand::Rng;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::cups::{cup_diagram, degree, is_oriented, orientations, Arc, ArcKind, CupDiagram};
use crate::error::{Error, Result};
use crate::scalars::GaussInt;
use crate::weights::{all_weights, contract_weight, Label, Weight};

/// A basis element `λ̲ ν μ̄`: the cup diagram of `bottom` and the cap diagram of
/// `top`, both oriented by `orient`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrientedTriple {
    pub bottom: Weight,
    pub orient: Weight,
    pub top: Weight,
}

impl OrientedTriple {
    pub fn new(bottom: Weight, orient: Weight, top: Weight) -> Result<Self> {
        let n = bottom.n();
        for w in [&orient, &top] {
            if w.n() != n {
                return Err(Error::SizeMismatch { expected: n, got: w.n() });
            }
        }
        if !is_oriented(&cup_diagram(&bottom), &orient) || !is_oriented(&cup_diagram(&top), &orient) {
            return Err(Error::InvalidTriple(format!("{bottom},{orient},{top}")));
        }
        Ok(OrientedTriple { bottom, orient, top })
    }

    /// `e_λ = λ̲ λ λ̄`.
    pub fn idempotent(w: &Weight) -> Self {
        OrientedTriple { bottom: w.clone(), orient: w.clone(), top: w.clone() }
    }

    pub fn n(&self) -> usize {
        self.bottom.n()
    }

    pub fn degree(&self) -> usize {
        degree(&cup_diagram(&self.bottom), &self.orient).expect("triple is oriented")
            + degree(&cup_diagram(&self.top), &self.orient).expect("triple is oriented")
    }
}

impl fmt::Display for OrientedTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.bottom, self.orient, self.top)
    }
}

impl FromStr for OrientedTriple {
    type Err = Error;

    /// `bottom,orient,top`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected bottom,orient,top but got {s:?}")));
        }
        OrientedTriple::new(parts[0].parse()?, parts[1].parse()?, parts[2].parse()?)
    }
}

/// All oriented circle diagrams on `n` vertices, sorted.
pub fn circle_basis(n: usize) -> Result<Vec<OrientedTriple>> {
    let ws = all_weights(n)?;
    let diagrams: Vec<CupDiagram> = ws.iter().map(cup_diagram).collect();
    let mut out = Vec::new();
    for lam in &ws {
        for nu in orientations(&cup_diagram(lam)) {
            for (mu, d) in ws.iter().zip(&diagrams) {
                if is_oriented(d, &nu) {
                    out.push(OrientedTriple { bottom: lam.clone(), orient: nu.clone(), top: mu.clone() });
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// A `ℤ[i]`-linear combination of basis elements. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Element {
    terms: BTreeMap<OrientedTriple, GaussInt>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn basis(t: OrientedTriple) -> Self {
        Element::term(GaussInt::ONE, t)
    }

    pub fn term(c: GaussInt, t: OrientedTriple) -> Self {
        let mut e = Element::zero();
        e.add_term(t, c);
        e
    }

    pub fn add_term(&mut self, t: OrientedTriple, c: GaussInt) {
        let entry = self.terms.entry(t).or_insert(GaussInt::ZERO);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn coeff(&self, t: &OrientedTriple) -> GaussInt {
        self.terms.get(t).copied().unwrap_or(GaussInt::ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OrientedTriple, GaussInt)> + '_ {
        self.terms.iter().map(|(t, &c)| (t, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn scale(&self, c: GaussInt) -> Element {
        let mut out = Element::zero();
        for (t, x) in self.terms() {
            out.add_term(t.clone(), c * x);
        }
        out
    }

    /// Splits the element into its homogeneous components.
    pub fn homogeneous_parts(&self) -> BTreeMap<usize, Element> {
        let mut out: BTreeMap<usize, Element> = BTreeMap::new();
        for (t, c) in self.terms() {
            out.entry(t.degree()).or_default().add_term(t.clone(), c);
        }
        out
    }

    fn n(&self) -> Option<usize> {
        self.terms.keys().next().map(OrientedTriple::n)
    }
}

impl FromIterator<(OrientedTriple, GaussInt)> for Element {
    fn from_iter<I: IntoIterator<Item = (OrientedTriple, GaussInt)>>(iter: I) -> Self {
        let mut e = Element::zero();
        for (t, c) in iter {
            e.add_term(t, c);
        }
        e
    }
}

impl AddAssign<&Element> for Element {
    fn add_assign(&mut self, rhs: &Element) {
        for (t, c) in rhs.terms() {
            self.add_term(t.clone(), c);
        }
    }
}

impl Add for Element {
    type Output = Element;

    fn add(mut self, rhs: Element) -> Element {
        self += &rhs;
        self
    }
}

impl Neg for Element {
    type Output = Element;

    fn neg(self) -> Element {
        self.scale(-GaussInt::ONE)
    }
}

impl Sub for Element {
    type Output = Element;

    fn sub(self, rhs: Element) -> Element {
        self + (-rhs)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms().map(|(t, c)| format!("({c})*[{t}]")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Serialize)]
struct JsonTerm<'a> {
    bottom: &'a Weight,
    orient: &'a Weight,
    top: &'a Weight,
    coeff: GaussInt,
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len()))?;
        for (t, coeff) in self.terms() {
            seq.serialize_element(&JsonTerm { bottom: &t.bottom, orient: &t.orient, top: &t.top, coeff })?;
        }
        seq.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub x: usize,
    pub level: u8,
}

impl Vertex {
    pub fn new(x: usize, level: u8) -> Self {
        Vertex { x, level }
    }

    fn id(self) -> usize {
        2 * self.x + self.level as usize
    }

    fn from_id(id: usize) -> Self {
        Vertex { x: id / 2, level: (id % 2) as u8 }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}/2,{}]", 2 * self.x + 1, self.level)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentKind {
    Circle,
    PropagatingLine,
    NonPropagatingLine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Clockwise,
    AntiClockwise,
}

impl Orientation {
    /// The symbol at the tag.
    pub fn label(self) -> Label {
        match self {
            Orientation::Clockwise => Label::Down,
            Orientation::AntiClockwise => Label::Up,
        }
    }
}

/// A connected component of a stacked diagram. `vertices` is sorted, so the tag is
/// the last entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub vertices: Vec<Vertex>,
    pub kind: ComponentKind,
    pub decorations: usize,
}

impl Component {
    pub fn is_line(&self) -> bool {
        self.kind != ComponentKind::Circle
    }

    /// Rightmost vertex, northernmost on ties.
    pub fn tag(&self) -> Vertex {
        *self.vertices.last().expect("components are non-empty")
    }

    /// Parity rule for whether some orientation exists.
    fn parity_ok(&self) -> bool {
        match self.kind {
            ComponentKind::Circle | ComponentKind::PropagatingLine => self.decorations.is_multiple_of(2),
            ComponentKind::NonPropagatingLine => self.decorations % 2 == 1,
        }
    }
}

/// Two circle diagrams `λ̲ ν₀ ᾱ` and `α̲ ν₁ μ̄` stacked, with some middle cups
/// already replaced by vertical pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StackedDiagram {
    n: usize,
    bottom: CupDiagram,
    alpha: CupDiagram,
    deleted: Vec<bool>,
    top: CupDiagram,
    w0: Vec<Label>,
    w1: Vec<Label>,
}

impl StackedDiagram {
    pub fn new(bottom: &Weight, w0: &Weight, alpha: &Weight, w1: &Weight, top: &Weight) -> Result<Self> {
        let n = bottom.n();
        for w in [w0, alpha, w1, top] {
            if w.n() != n {
                return Err(Error::SizeMismatch { expected: n, got: w.n() });
            }
        }
        let (bd, ad, td) = (cup_diagram(bottom), cup_diagram(alpha), cup_diagram(top));
        for (d, w) in [(&bd, w0), (&ad, w0), (&ad, w1), (&td, w1)] {
            if !is_oriented(d, w) {
                return Err(Error::NotOriented {
                    weight: d.underlying_weight().to_string(),
                    orient: w.to_string(),
                });
            }
        }
        Ok(StackedDiagram {
            n,
            deleted: vec![false; ad.arcs().len()],
            bottom: bd,
            alpha: ad,
            top: td,
            w0: w0.labels().to_vec(),
            w1: w1.labels().to_vec(),
        })
    }

    /// `a` below `b`; requires `a.top == b.bottom`.
    pub fn stack(a: &OrientedTriple, b: &OrientedTriple) -> Result<Self> {
        if a.top != b.bottom {
            return Err(Error::InvalidTriple(format!("cannot stack {a} under {b}")));
        }
        StackedDiagram::new(&a.bottom, &a.orient, &a.top, &b.orient, &b.top)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bottom(&self) -> &CupDiagram {
        &self.bottom
    }

    pub fn alpha(&self) -> &CupDiagram {
        &self.alpha
    }

    pub fn top(&self) -> &CupDiagram {
        &self.top
    }

    pub fn w0(&self) -> Weight {
        Weight::from_labels_unchecked(self.w0.clone())
    }

    pub fn w1(&self) -> Weight {
        Weight::from_labels_unchecked(self.w1.clone())
    }

    pub fn label(&self, v: Vertex) -> Label {
        if v.level == 0 {
            self.w0[v.x]
        } else {
            self.w1[v.x]
        }
    }

    fn set_label(&mut self, v: Vertex, l: Label) {
        if v.level == 0 {
            self.w0[v.x] = l;
        } else {
            self.w1[v.x] = l;
        }
    }

    pub fn is_deleted(&self, idx: usize) -> bool {
        self.deleted[idx]
    }

    /// Index into `alpha().arcs()` of the middle cup with these endpoints.
    pub fn middle_index(&self, left: usize, right: usize) -> Option<usize> {
        self.alpha.arcs().iter().position(|a| a.is_cup() && a.left() == left && a.right() == right)
    }

    pub fn intact_cups(&self) -> Vec<usize> {
        (0..self.alpha.arcs().len()).filter(|&i| self.alpha.arcs()[i].is_cup() && !self.deleted[i]).collect()
    }

    /// Every middle arc is a vertical strand.
    pub fn is_identity_middle(&self) -> bool {
        self.intact_cups().is_empty()
    }

    pub fn components(&self) -> Vec<Component> {
        Graph::build(self).comps
    }

    /// Whether the underlying arcs admit some orientation, ignoring the stored labels.
    pub fn orientable(&self) -> bool {
        Graph::build(self).orientable()
    }

    /// Exhaustive search over all `4^n` label assignments for one that orients every arc.
    pub fn orientable_brute_force(&self) -> bool {
        let mut d = self.clone();
        let bits = |m: u64| (0..self.n).map(|j| if m >> j & 1 == 1 { Label::Up } else { Label::Down }).collect();
        (0..1u64 << self.n).any(|a| {
            d.w0 = bits(a);
            (0..1u64 << self.n).any(|b| {
                d.w1 = bits(b);
                d.is_oriented()
            })
        })
    }

    /// Whether the stored labels orient every arc.
    pub fn is_oriented(&self) -> bool {
        let g = Graph::build(self);
        (0..2 * self.n).all(|v| {
            let lv = self.label(Vertex::from_id(v));
            g.forced[v].is_none_or(|f| f == lv)
                && g.adj[v].iter().all(|&(u, flip)| (self.label(Vertex::from_id(u)) != lv) == flip)
        })
    }

    pub fn tag(&self, c: &Component) -> Vertex {
        c.tag()
    }

    pub fn orient_of(&self, c: &Component) -> Orientation {
        if c.is_line() || self.label(c.tag()) == Label::Up {
            Orientation::AntiClockwise
        } else {
            Orientation::Clockwise
        }
    }

    /// `+1` iff the symbol at `v` matches the orientation symbol of its component.
    pub fn sign_at(&self, v: Vertex) -> i64 {
        let g = Graph::build(self);
        g.sign(self, v.id())
    }

    /// No intact decorated middle cup has a vertical strand to its left.
    pub fn is_admissible_middle(&self) -> bool {
        let verticals: Vec<usize> = self
            .alpha
            .arcs()
            .iter()
            .enumerate()
            .filter(|&(i, a)| !a.is_cup() || self.deleted[i])
            .map(|(_, a)| a.left())
            .collect();
        self.intact_cups().into_iter().all(|i| {
            let a = &self.alpha.arcs()[i];
            !a.decorated || verticals.iter().all(|&x| x > a.left())
        })
    }
}

impl fmt::Display for StackedDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut middle = vec!['|'; self.n];
        for (i, a) in self.alpha.arcs().iter().enumerate() {
            if let ArcKind::Cup { left, right } = a.kind {
                if !self.deleted[i] {
                    middle[left] = if a.decorated { '{' } else { '(' };
                    middle[right] = if a.decorated { '}' } else { ')' };
                }
            }
        }
        let middle: String = middle.into_iter().collect();
        write!(
            f,
            "top {} | w1 {} | middle {} | w0 {} | bottom {}",
            self.top,
            self.w1(),
            middle,
            self.w0(),
            self.bottom
        )
    }
}

struct Graph {
    comp_of: Vec<usize>,
    comps: Vec<Component>,
    adj: Vec<Vec<(usize, bool)>>,
    forced: Vec<Option<Label>>,
}

fn ray_label(decorated: bool) -> Label {
    if decorated {
        Label::Up
    } else {
        Label::Down
    }
}

impl Graph {
    fn build(d: &StackedDiagram) -> Graph {
        let nv = 2 * d.n;
        let mut edges: Vec<(usize, usize, bool, bool)> = Vec::new(); // (a, b, flip, decorated)
        let mut forced = vec![None; nv];
        let mut bottom_end = vec![false; nv];
        let mut top_end = vec![false; nv];
        let v = |x: usize, y: u8| Vertex::new(x, y).id();
        for a in d.bottom.arcs() {
            match a.kind {
                ArcKind::Cup { left, right } => edges.push((v(left, 0), v(right, 0), !a.decorated, a.decorated)),
                ArcKind::Ray { at } => {
                    forced[v(at, 0)] = Some(ray_label(a.decorated));
                    bottom_end[v(at, 0)] = true;
                }
            }
        }
        for (i, a) in d.alpha.arcs().iter().enumerate() {
            match a.kind {
                ArcKind::Cup { left, right } if !d.deleted[i] => {
                    edges.push((v(left, 0), v(right, 0), !a.decorated, a.decorated));
                    edges.push((v(left, 1), v(right, 1), !a.decorated, a.decorated));
                }
                ArcKind::Cup { left, right } => {
                    edges.push((v(left, 0), v(left, 1), false, false));
                    edges.push((v(right, 0), v(right, 1), false, false));
                }
                ArcKind::Ray { at } => edges.push((v(at, 0), v(at, 1), false, false)),
            }
        }
        for a in d.top.arcs() {
            match a.kind {
                ArcKind::Cup { left, right } => edges.push((v(left, 1), v(right, 1), !a.decorated, a.decorated)),
                ArcKind::Ray { at } => {
                    forced[v(at, 1)] = Some(ray_label(a.decorated));
                    top_end[v(at, 1)] = true;
                }
            }
        }
        let mut uf = UnionFind::<usize>::new(nv);
        let mut adj = vec![Vec::new(); nv];
        for &(a, b, flip, _) in &edges {
            uf.union(a, b);
            adj[a].push((b, flip));
            adj[b].push((a, flip));
        }
        let mut dense: BTreeMap<usize, usize> = BTreeMap::new();
        let mut comp_of = vec![0; nv];
        let mut members: Vec<Vec<usize>> = Vec::new();
        for (x, slot) in comp_of.iter_mut().enumerate() {
            let root = uf.find(x);
            let next = dense.len();
            let id = *dense.entry(root).or_insert(next);
            if id == members.len() {
                members.push(Vec::new());
            }
            members[id].push(x);
            *slot = id;
        }
        let mut decorations = vec![0; members.len()];
        for &(a, _, _, dec) in &edges {
            if dec {
                decorations[comp_of[a]] += 1;
            }
        }
        for (x, f) in forced.iter().enumerate() {
            // a decorated boundary ray forces an up label
            if *f == Some(Label::Up) {
                decorations[comp_of[x]] += 1;
            }
        }
        let comps = members
            .into_iter()
            .enumerate()
            .map(|(id, vs)| {
                let touches_bottom = vs.iter().any(|&x| bottom_end[x]);
                let touches_top = vs.iter().any(|&x| top_end[x]);
                let kind = match (touches_bottom, touches_top) {
                    (false, false) => ComponentKind::Circle,
                    (true, true) => ComponentKind::PropagatingLine,
                    _ => ComponentKind::NonPropagatingLine,
                };
                let mut vertices: Vec<Vertex> = vs.into_iter().map(Vertex::from_id).collect();
                vertices.sort();
                Component { vertices, kind, decorations: decorations[id] }
            })
            .collect();
        Graph { comp_of, comps, adj, forced }
    }

    fn orientable(&self) -> bool {
        self.comps.iter().all(Component::parity_ok)
    }

    fn sign(&self, d: &StackedDiagram, v: usize) -> i64 {
        let c = &self.comps[self.comp_of[v]];
        if d.label(Vertex::from_id(v)) == d.orient_of(c).label() {
            1
        } else {
            -1
        }
    }

    /// Labels for component `c` realising orientation `o`, if any. Lines only accept
    /// the anti-clockwise orientation and take their labels from the rays.
    fn solve(&self, c: usize, o: Orientation) -> Option<Vec<(usize, Label)>> {
        let comp = &self.comps[c];
        let (start, label) = if comp.is_line() {
            if o == Orientation::Clockwise {
                return None;
            }
            let s = comp.vertices.iter().map(|v| v.id()).find(|&v| self.forced[v].is_some())?;
            (s, self.forced[s]?)
        } else {
            (comp.tag().id(), o.label())
        };
        let mut assigned: BTreeMap<usize, Label> = BTreeMap::new();
        assigned.insert(start, label);
        let mut stack = vec![start];
        while let Some(a) = stack.pop() {
            let la = assigned[&a];
            if self.forced[a].is_some_and(|f| f != la) {
                return None;
            }
            for &(b, flip) in &self.adj[a] {
                let lb = if flip { la.flip() } else { la };
                match assigned.get(&b) {
                    Some(&x) if x != lb => return None,
                    Some(_) => {}
                    None => {
                        assigned.insert(b, lb);
                        stack.push(b);
                    }
                }
            }
        }
        Some(assigned.into_iter().collect())
    }

    /// A copy of `d` with the listed components re-oriented.
    fn reorient(&self, d: &StackedDiagram, wanted: &[(usize, Orientation)]) -> Option<StackedDiagram> {
        let mut out = d.clone();
        for &(c, o) in wanted {
            for (v, l) in self.solve(c, o)? {
                out.set_label(Vertex::from_id(v), l);
            }
        }
        Some(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurgeryKind {
    Merge,
    Split,
    Reconnect,
}

#[derive(Clone, Debug)]
pub struct SurgeryOutcome {
    pub kind: SurgeryKind,
    pub terms: Vec<(i64, StackedDiagram)>,
}

/// Surgery on the middle cup `alpha().arcs()[idx]`.
pub fn surgery(d: &StackedDiagram, idx: usize) -> Result<SurgeryOutcome> {
    let s = *d.alpha.arcs().get(idx).ok_or(Error::MiddleNotACup(idx))?;
    let (l, r) = s.ends().map_err(|_| Error::MiddleNotACup(idx))?;
    if d.deleted[idx] {
        return Err(Error::AlreadyDeleted(s.to_string()));
    }
    let g = Graph::build(d);
    let mut dp = d.clone();
    dp.deleted[idx] = true;
    let gp = Graph::build(&dp);
    let v = |x: usize, y: u8| Vertex::new(x, y).id();
    let (c0, c1) = (g.comp_of[v(l, 0)], g.comp_of[v(l, 1)]);
    let orient = |c: usize| d.orient_of(&g.comps[c]);
    use Orientation::{AntiClockwise as Anti, Clockwise as Clock};

    let (kind, terms) = match gp.comps.len() as i64 - g.comps.len() as i64 {
        -1 => {
            let c = gp.comp_of[v(l, 0)];
            let terms = match (orient(c0), orient(c1)) {
                (Anti, Anti) => gp.reorient(&dp, &[(c, Anti)]).map(|t| (1, t)),
                (Clock, Anti) => gp
                    .reorient(&dp, &[(c, Clock)])
                    .map(|t| (g.sign(d, v(l, 0)) * gp.sign(&t, v(l, 0)), t)),
                (Anti, Clock) => gp
                    .reorient(&dp, &[(c, Clock)])
                    .map(|t| (g.sign(d, v(l, 1)) * gp.sign(&t, v(l, 1)), t)),
                (Clock, Clock) => None,
            };
            (SurgeryKind::Merge, terms.into_iter().collect())
        }
        1 => {
            let mut terms = Vec::new();
            if gp.orientable() {
                let (cl, cr) = (gp.comp_of[v(l, 1)], gp.comp_of[v(r, 1)]);
                let pre = if l % 2 == 0 { 1 } else { -1 };
                match orient(c1) {
                    Anti => {
                        if let Some(t) = gp.reorient(&dp, &[(cl, Anti), (cr, Clock)]) {
                            terms.push((pre * gp.sign(&t, v(r, 1)), t));
                        }
                        if let Some(t) = gp.reorient(&dp, &[(cl, Clock), (cr, Anti)]) {
                            let sgn = if s.decorated { 1 } else { -1 };
                            terms.push((sgn * pre * gp.sign(&t, v(l, 1)), t));
                        }
                    }
                    Clock => {
                        if let Some(t) = gp.reorient(&dp, &[(cl, Clock), (cr, Clock)]) {
                            let c = pre * g.sign(d, v(l, 1)) * gp.sign(&t, v(l, 1)) * gp.sign(&t, v(r, 1));
                            terms.push((c, t));
                        }
                    }
                }
            }
            (SurgeryKind::Split, terms)
        }
        0 => {
            let propagating = |c: usize| g.comps[c].kind == ComponentKind::PropagatingLine;
            let mut terms = Vec::new();
            if c0 != c1 && propagating(c0) && propagating(c1) && gp.orientable() {
                let lines = [gp.comp_of[v(l, 0)], gp.comp_of[v(r, 0)]];
                if let Some(t) = gp.reorient(&dp, &[(lines[0], Anti), (lines[1], Anti)]) {
                    terms.push((1, t));
                }
            }
            (SurgeryKind::Reconnect, terms)
        }
        _ => unreachable!("surgery changes the component count by at most one"),
    };
    Ok(SurgeryOutcome { kind, terms })
}

/// Intact middle cups whose surgery keeps the middle admissible: not covered by an
/// intact cup and with no intact decorated cup further right.
pub fn admissible_cups(d: &StackedDiagram) -> Vec<usize> {
    let intact = d.intact_cups();
    let arcs = d.alpha.arcs();
    intact
        .iter()
        .copied()
        .filter(|&i| {
            let s = arcs[i];
            intact.iter().all(|&j| {
                let p = arcs[j];
                j == i
                    || !((p.left() < s.left() && s.right() < p.right()) || (p.decorated && s.right() < p.left()))
            })
        })
        .collect()
}

/// The admissible intact cup with the largest left endpoint.
pub fn admissible_next(d: &StackedDiagram) -> Result<usize> {
    admissible_cups(d)
        .into_iter()
        .max_by_key(|&i| d.alpha.arcs()[i].left())
        .ok_or(Error::NoAdmissibleSurgery)
}

/// A uniformly random admissible intact cup.
pub fn random_admissible<R: Rng>(d: &StackedDiagram, rng: &mut R) -> Result<usize> {
    let c = admissible_cups(d);
    if c.is_empty() {
        return Err(Error::NoAdmissibleSurgery);
    }
    Ok(c[rng.random_range(0..c.len())])
}

/// Surgery when one side of `s` is a small anti-clockwise circle: the circle is
/// absorbed and the labels of the opposite level are copied onto its vertices.
pub fn local_idempotent_fast_path(d: &StackedDiagram, idx: usize) -> Result<Vec<(i64, StackedDiagram)>> {
    let s = *d.alpha.arcs().get(idx).ok_or(Error::MiddleNotACup(idx))?;
    let (l, r) = s.ends().map_err(|_| Error::MiddleNotACup(idx))?;
    if d.deleted[idx] {
        return Err(Error::AlreadyDeleted(s.to_string()));
    }
    let level = local_idempotent_level(d, &s).ok_or_else(|| Error::NotLocalIdempotent(s.to_string()))?;
    let mut out = d.clone();
    out.deleted[idx] = true;
    for x in [l, r] {
        let copied = d.label(Vertex::new(x, 1 - level));
        out.set_label(Vertex::new(x, level), copied);
    }
    Ok(vec![(1, out)])
}

/// The level on which `s` closes a small anti-clockwise circle, if any.
pub fn local_idempotent_level(d: &StackedDiagram, s: &Arc) -> Option<u8> {
    let (l, r) = s.ends().ok()?;
    [0u8, 1].into_iter().find(|&y| {
        let outer = if y == 0 { &d.bottom } else { &d.top };
        outer.contains(&Arc::cup(l, r, s.decorated)) && d.label(Vertex::new(r, y)) == Label::Up
    })
}

fn finish(terms: BTreeMap<StackedDiagram, i64>) -> Element {
    terms
        .into_iter()
        .map(|(sd, c)| {
            debug_assert_eq!(sd.w0, sd.w1);
            let t = OrientedTriple {
                bottom: sd.bottom.underlying_weight(),
                orient: sd.w0(),
                top: sd.top.underlying_weight(),
            };
            (t, GaussInt::from(c))
        })
        .collect()
}

/// Runs surgeries on `d` until the middle is the identity, choosing cups with `choose`.
pub fn resolve<F>(d: StackedDiagram, mut choose: F) -> Result<Element>
where
    F: FnMut(&StackedDiagram) -> Result<usize>,
{
    let mut terms: BTreeMap<StackedDiagram, i64> = BTreeMap::from([(d, 1)]);
    loop {
        let Some(first) = terms.keys().next() else {
            return Ok(Element::zero());
        };
        if first.is_identity_middle() {
            return Ok(finish(terms));
        }
        let idx = choose(first)?;
        let mut next: BTreeMap<StackedDiagram, i64> = BTreeMap::new();
        for (sd, c) in terms {
            for (k, t) in surgery(&sd, idx)?.terms {
                *next.entry(t).or_insert(0) += c * k;
            }
        }
        next.retain(|_, c| *c != 0);
        terms = next;
    }
}

/// Every stacked diagram met while computing `a·b` in the canonical order, including
/// terms that later cancel.
pub fn product_diagrams(a: &OrientedTriple, b: &OrientedTriple) -> Result<Vec<StackedDiagram>> {
    if a.top != b.bottom {
        return Ok(Vec::new());
    }
    let mut seen = Vec::new();
    let mut stage = vec![StackedDiagram::stack(a, b)?];
    while let Some(first) = stage.first() {
        seen.extend(stage.iter().cloned());
        if first.is_identity_middle() {
            break;
        }
        let idx = admissible_next(first)?;
        let mut next = BTreeMap::new();
        for sd in &stage {
            for (_, t) in surgery(sd, idx)?.terms {
                next.insert(t, ());
            }
        }
        stage = next.into_keys().collect();
    }
    Ok(seen)
}

/// The product `a·b`, with `a` on the bottom level.
pub fn multiply(a: &OrientedTriple, b: &OrientedTriple) -> Result<Element> {
    multiply_with(a, b, admissible_next)
}

pub fn multiply_with<F>(a: &OrientedTriple, b: &OrientedTriple, choose: F) -> Result<Element>
where
    F: FnMut(&StackedDiagram) -> Result<usize>,
{
    if a.n() != b.n() {
        return Err(Error::SizeMismatch { expected: a.n(), got: b.n() });
    }
    if a.top != b.bottom {
        return Ok(Element::zero());
    }
    resolve(StackedDiagram::stack(a, b)?, choose)
}

/// Bilinear extension of [`multiply`].
pub fn element_mul(x: &Element, y: &Element) -> Result<Element> {
    if let (Some(a), Some(b)) = (x.n(), y.n()) {
        if a != b {
            return Err(Error::SizeMismatch { expected: a, got: b });
        }
    }
    let mut out = Element::zero();
    for (s, c) in x.terms() {
        for (t, d) in y.terms() {
            if s.top == t.bottom {
                out += &multiply(s, t)?.scale(c * d);
            }
        }
    }
    Ok(out)
}

/// `Σ_λ e_λ`.
pub fn unit(n: usize) -> Result<Element> {
    Ok(all_weights(n)?.iter().map(|w| (OrientedTriple::idempotent(w), GaussInt::ONE)).collect())
}

/// Componentwise contraction at `k`.
pub fn contract_triple(t: &OrientedTriple, k: usize) -> Result<OrientedTriple> {
    Ok(OrientedTriple {
        bottom: contract_weight(&t.bottom, k)?,
        orient: contract_weight(&t.orient, k)?,
        top: contract_weight(&t.top, k)?,
    })
}

pub fn contract_element(x: &Element, k: usize) -> Result<Element> {
    x.terms().map(|(t, c)| Ok((contract_triple(t, k)?, c))).collect()
}

/// Outcome of the generation check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GenerationReport {
    pub dimension: usize,
    pub rank: usize,
    pub generators: usize,
}

impl GenerationReport {
    pub fn spans(&self) -> bool {
        self.rank == self.dimension
    }
}

const PRIME: u64 = 1_000_000_009;

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    b %= PRIME;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % PRIME;
        }
        b = b * b % PRIME;
        e >>= 1;
    }
    acc
}

/// A square root of -1 modulo `PRIME` (which is 1 mod 4).
fn sqrt_minus_one() -> u64 {
    (2..)
        .map(|g| pow_mod(g, (PRIME - 1) / 4))
        .find(|&c| c * c % PRIME == PRIME - 1)
        .expect("PRIME is 1 mod 4")
}

/// Incremental row echelon form over `F_p`, with `i` sent to a fixed root of -1.
struct ModSpan {
    rows: Vec<(usize, Vec<u64>)>,
    index: BTreeMap<OrientedTriple, usize>,
    i: u64,
}

impl ModSpan {
    fn reduce(&self, x: &Element) -> Vec<u64> {
        let mut v = vec![0u64; self.index.len()];
        for (t, c) in x.terms() {
            let re = c.re.rem_euclid(PRIME as i64) as u64;
            let im = c.im.rem_euclid(PRIME as i64) as u64;
            let j = self.index[t];
            v[j] = (v[j] + re + im * self.i % PRIME) % PRIME;
        }
        for (pivot, row) in &self.rows {
            let f = v[*pivot];
            if f != 0 {
                for (a, b) in v.iter_mut().zip(row) {
                    *a = (*a + PRIME - f * b % PRIME) % PRIME;
                }
            }
        }
        v
    }

    /// Adds `x` to the span; returns whether the rank grew.
    fn insert(&mut self, x: &Element) -> bool {
        let mut v = self.reduce(x);
        let Some(pivot) = v.iter().position(|&a| a != 0) else {
            return false;
        };
        let inv = pow_mod(v[pivot], PRIME - 2);
        for a in v.iter_mut() {
            *a = *a * inv % PRIME;
        }
        for (_, row) in self.rows.iter_mut() {
            let f = row[pivot];
            if f != 0 {
                for (a, b) in row.iter_mut().zip(&v) {
                    *a = (*a + PRIME - f * b % PRIME) % PRIME;
                }
            }
        }
        self.rows.push((pivot, v));
        true
    }
}

/// Rank of the subalgebra generated by the basis elements of degree at most one,
/// computed modulo a prime `p ≡ 1 (mod 4)`. A rank equal to the dimension certifies
/// generation over `ℚ(i)`.
pub fn generation_check(n: usize) -> Result<GenerationReport> {
    let basis = circle_basis(n)?;
    let gens: Vec<OrientedTriple> = basis.iter().filter(|t| t.degree() <= 1).cloned().collect();
    let mut span = ModSpan {
        rows: Vec::new(),
        index: basis.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect(),
        i: sqrt_minus_one(),
    };
    let mut queue: Vec<Element> = Vec::new();
    for g in &gens {
        let e = Element::basis(g.clone());
        if span.insert(&e) {
            queue.push(e);
        }
    }
    while let Some(x) = queue.pop() {
        for g in &gens {
            let y = element_mul(&x, &Element::basis(g.clone()))?;
            if !y.is_zero() && span.insert(&y) {
                queue.push(y);
            }
        }
        if span.rows.len() == basis.len() {
            break;
        }
    }
    Ok(GenerationReport { dimension: basis.len(), rank: span.rows.len(), generators: gens.len() })
}
