//! The Hecke side, realised on the arc algebra through `Ψ`.
//!
//! A word `D^{x0}_{x1} D^{x1}_{x2} ...` is stored as the weight path `[x0, x1, x2, ...]`.
//! Every relation of the presentation becomes a finite list of signed paths on each side,
//! and checking a relation means evaluating both sides in the arc algebra.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arc_algebra::{
    circle_basis, contract_element, contract_triple, element_mul, multiply, Element, OrientedTriple,
};
use crate::cups::{
    breadth, commute, contract_cup, covers, cup_diagram, degree, doubly_covers, flipped_cup, generated_cup,
    is_oriented, kappa_of_cup, remove_cup, Arc,
};
use crate::error::{Error, Result};
use crate::scalars::{i_pow, sign_pow, GaussInt, LaurentPoly};
use crate::weights::{all_weights, bruhat_leq, contract_weight, is_contractible, weight_to_partition, Weight};

/// A degree zero or one generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HeckeGen {
    Idempotent(Weight),
    /// `D^λ_μ` with `λ = μ - p`.
    Down { lam: Weight, mu: Weight },
    /// `D^μ_λ` with `λ = μ - p`.
    Up { mu: Weight, lam: Weight },
}

impl HeckeGen {
    /// The generator written `D^sup_sub`; equal weights give the idempotent.
    pub fn new(sup: &Weight, sub: &Weight) -> Result<HeckeGen> {
        if sup.n() != sub.n() {
            return Err(Error::SizeMismatch { expected: sup.n(), got: sub.n() });
        }
        if sup == sub {
            return Ok(HeckeGen::Idempotent(sup.clone()));
        }
        if flipped_cup(sup, sub).is_some() {
            return Ok(HeckeGen::Down { lam: sup.clone(), mu: sub.clone() });
        }
        if flipped_cup(sub, sup).is_some() {
            return Ok(HeckeGen::Up { mu: sup.clone(), lam: sub.clone() });
        }
        Err(Error::NotACupFlip { lam: sup.to_string(), mu: sub.to_string() })
    }

    pub fn sup(&self) -> &Weight {
        match self {
            HeckeGen::Idempotent(w) => w,
            HeckeGen::Down { lam, .. } => lam,
            HeckeGen::Up { mu, .. } => mu,
        }
    }

    pub fn sub(&self) -> &Weight {
        match self {
            HeckeGen::Idempotent(w) => w,
            HeckeGen::Down { mu, .. } => mu,
            HeckeGen::Up { lam, .. } => lam,
        }
    }

    /// The flipped cup `p` of `μ̲`, if any.
    pub fn cup(&self) -> Option<Arc> {
        match self {
            HeckeGen::Idempotent(_) => None,
            HeckeGen::Down { lam, mu } | HeckeGen::Up { mu, lam } => flipped_cup(lam, mu),
        }
    }

    pub fn dual(&self) -> HeckeGen {
        match self {
            HeckeGen::Idempotent(w) => HeckeGen::Idempotent(w.clone()),
            HeckeGen::Down { lam, mu } => HeckeGen::Up { mu: mu.clone(), lam: lam.clone() },
            HeckeGen::Up { mu, lam } => HeckeGen::Down { lam: lam.clone(), mu: mu.clone() },
        }
    }

    pub fn degree(&self) -> usize {
        usize::from(!matches!(self, HeckeGen::Idempotent(_)))
    }
}

impl fmt::Display for HeckeGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeckeGen::Idempotent(w) => write!(f, "1_{w}"),
            g => write!(f, "D^{}_{}", g.sup(), g.sub()),
        }
    }
}

/// `Ψ` on a generator.
pub fn psi(g: &HeckeGen) -> Result<Element> {
    Ok(match g {
        HeckeGen::Idempotent(w) => Element::basis(OrientedTriple::idempotent(w)),
        HeckeGen::Down { lam, mu } => {
            let p = flipped_cup(lam, mu).ok_or_else(|| not_flip(lam, mu))?;
            let t = OrientedTriple::new(lam.clone(), lam.clone(), mu.clone())?;
            Element::term(i_pow(kappa_of_cup(&p)), t)
        }
        HeckeGen::Up { mu, lam } => {
            let p = flipped_cup(lam, mu).ok_or_else(|| not_flip(lam, mu))?;
            let t = OrientedTriple::new(mu.clone(), lam.clone(), lam.clone())?;
            Element::term(i_pow(kappa_of_cup(&p)), t)
        }
    })
}

fn not_flip(lam: &Weight, mu: &Weight) -> Error {
    Error::NotACupFlip { lam: lam.to_string(), mu: mu.to_string() }
}

/// `Ψ` of the word `D^{x0}_{x1} D^{x1}_{x2} ...`. A single weight is its idempotent.
pub fn psi_path(path: &[Weight]) -> Result<Element> {
    match path {
        [] => Err(Error::InvalidTriple("empty path".into())),
        [w] => psi(&HeckeGen::Idempotent(w.clone())),
        _ => {
            let mut acc = psi(&HeckeGen::new(&path[0], &path[1])?)?;
            for pair in path[1..].windows(2) {
                acc = element_mul(&acc, &psi(&HeckeGen::new(&pair[0], &pair[1])?)?)?;
            }
            Ok(acc)
        }
    }
}

/// `ᵖn_{λ,μ}`: `q^{deg(μ̲λ)}` if `μ̲λ` is oriented, else zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KLPoly {
    pub value: LaurentPoly,
}

impl fmt::Display for KLPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

pub fn kl_poly(lam: &Weight, mu: &Weight) -> Result<KLPoly> {
    if lam.n() != mu.n() {
        return Err(Error::SizeMismatch { expected: mu.n(), got: lam.n() });
    }
    let d = cup_diagram(mu);
    let value = if is_oriented(&d, lam) {
        LaurentPoly::monomial(1, degree(&d, lam)? as i64)
    } else {
        LaurentPoly::zero()
    };
    Ok(KLPoly { value })
}

/// Index `(μ, λ, ν)` of the cellular basis element `D^μ_λ D^λ_ν`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CellTriple {
    pub mu: Weight,
    pub lam: Weight,
    pub nu: Weight,
    pub degree: usize,
}

impl CellTriple {
    /// The circle diagram carrying the same grading data, `μ̲ λ ν̄`.
    pub fn to_oriented(&self) -> Result<OrientedTriple> {
        OrientedTriple::new(self.mu.clone(), self.lam.clone(), self.nu.clone())
    }
}

pub fn cell_triples(n: usize) -> Result<Vec<CellTriple>> {
    let ws = all_weights(n)?;
    let mut out = Vec::new();
    for lam in &ws {
        let above: Vec<(&Weight, usize)> = ws
            .iter()
            .filter_map(|m| {
                let d = cup_diagram(m);
                is_oriented(&d, lam).then(|| (m, degree(&d, lam).unwrap()))
            })
            .collect();
        for &(mu, dm) in &above {
            for &(nu, dn) in &above {
                out.push(CellTriple { mu: mu.clone(), lam: lam.clone(), nu: nu.clone(), degree: dm + dn });
            }
        }
    }
    out.sort();
    Ok(out)
}

pub fn poincare_cells(n: usize) -> Result<LaurentPoly> {
    let mut p = LaurentPoly::zero();
    for c in cell_triples(n)? {
        p.add_term(1, c.degree as i64);
    }
    Ok(p)
}

pub fn poincare_circles(n: usize) -> Result<LaurentPoly> {
    let mut p = LaurentPoly::zero();
    for t in circle_basis(n)? {
        p.add_term(1, t.degree() as i64);
    }
    Ok(p)
}

/// Product of two cellular basis elements, with structure constants pulled back through
/// `Ψ`: cell index `(μ, λ, ν)` is identified with the circle diagram `μ̲ λ ν̄`, and the
/// result is keyed by the same indices.
pub fn hecke_product(a: &CellTriple, b: &CellTriple) -> Result<Element> {
    if a.mu.n() != b.mu.n() {
        return Err(Error::SizeMismatch { expected: a.mu.n(), got: b.mu.n() });
    }
    multiply(&a.to_oriented()?, &b.to_oriented()?)
}

// ---------------------------------------------------------------------------
// Relation suite

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Idempotent,
    Commuting,
    NonCommuting,
    DoublyNonCommuting,
    SelfDualDoublyCovered,
    SelfDualOther,
    Adjacent,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Idempotent,
        Family::Commuting,
        Family::NonCommuting,
        Family::DoublyNonCommuting,
        Family::SelfDualDoublyCovered,
        Family::SelfDualOther,
        Family::Adjacent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Idempotent => "idempotent",
            Family::Commuting => "commuting",
            Family::NonCommuting => "non-commuting",
            Family::DoublyNonCommuting => "doubly-non-commuting",
            Family::SelfDualDoublyCovered => "self-dual-doubly-covered",
            Family::SelfDualOther => "self-dual-other",
            Family::Adjacent => "adjacent",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown relation family {s:?}")))
    }
}

/// Which families to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilySelector {
    All,
    One(Family),
}

impl FamilySelector {
    fn families(self) -> Vec<Family> {
        match self {
            FamilySelector::All => Family::ALL.to_vec(),
            FamilySelector::One(f) => vec![f],
        }
    }
}

impl std::str::FromStr for FamilySelector {
    type Err = Error;
    fn from_str(s: &str) -> Result<FamilySelector> {
        if s == "all" {
            Ok(FamilySelector::All)
        } else {
            s.parse().map(FamilySelector::One)
        }
    }
}

/// `coeff · D^{path[0]}_{path[1]} D^{path[1]}_{path[2]} ...`
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Word {
    pub coeff: GaussInt,
    pub path: Vec<Weight>,
}

impl Word {
    fn new(coeff: i64, path: Vec<Weight>) -> Word {
        Word { coeff: GaussInt::from_int(coeff), path }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Body {
    Check { lhs: Vec<Word>, rhs: Vec<Word> },
    /// The configuration matched the family but the structure the relation needs is missing.
    Hypothesis(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Instance {
    pub family: Family,
    pub n: usize,
    pub weights: Vec<Weight>,
    pub cups: Vec<Arc>,
    pub dual: bool,
    pub body: Body,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Mismatch,
    HypothesisFailure,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub family: Family,
    pub n: usize,
    pub weights: Vec<Weight>,
    pub cups: Vec<String>,
    pub dual: bool,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<Element>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<Element>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ws: Vec<String> = self.weights.iter().map(|w| w.to_string()).collect();
        let status = match self.status {
            Status::Ok => "ok",
            Status::Mismatch => "MISMATCH",
            Status::HypothesisFailure => "HYPOTHESIS",
            Status::Error => "ERROR",
        };
        write!(
            f,
            "{}{} n={} weights={} cups={} {}",
            self.family,
            if self.dual { "*" } else { "" },
            self.n,
            ws.join(","),
            self.cups.join(","),
            status
        )?;
        if let (Some(l), Some(r)) = (&self.lhs, &self.rhs) {
            let l = serde_json::to_string(l).unwrap_or_default();
            let r = serde_json::to_string(r).unwrap_or_default();
            write!(f, " lhs={l} rhs={r}")?;
        }
        if let Some(note) = &self.note {
            write!(f, " ({note})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub outcomes: Vec<Outcome>,
}

impl VerifyReport {
    pub fn checked(&self) -> usize {
        self.outcomes.len()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Outcome> {
        self.outcomes.iter().filter(|o| o.status != Status::Ok)
    }

    pub fn mismatches(&self) -> usize {
        self.failures().count()
    }

    pub fn counts(&self) -> BTreeMap<Family, usize> {
        let mut m = BTreeMap::new();
        for o in &self.outcomes {
            *m.entry(o.family).or_insert(0) += 1;
        }
        m
    }
}

fn sub(w: &Weight, a: &Arc) -> Weight {
    w.flip_pair(a.left(), a.right())
}

fn cups_of(w: &Weight) -> Vec<Arc> {
    cup_diagram(w).cups().copied().collect()
}

fn adjacent_in(lam: &Weight, p: &Arc) -> Vec<Arc> {
    let mut v: Vec<Arc> = cups_of(lam).into_iter().filter(|t| t.shares_endpoints(p) == 1).collect();
    v.sort_by_key(|a| a.left());
    v
}

struct Builder {
    n: usize,
    out: Vec<Instance>,
}

impl Builder {
    fn check(&mut self, family: Family, weights: Vec<Weight>, cups: Vec<Arc>, lhs: Vec<Word>, rhs: Vec<Word>) {
        let dual = |ws: &[Word]| -> Vec<Word> {
            ws.iter()
                .map(|w| Word { coeff: w.coeff, path: w.path.iter().rev().cloned().collect() })
                .collect()
        };
        let (dl, dr) = (dual(&lhs), dual(&rhs));
        let n = self.n;
        self.out.push(Instance {
            family,
            n,
            weights: weights.clone(),
            cups: cups.clone(),
            dual: false,
            body: Body::Check { lhs, rhs },
        });
        self.out.push(Instance { family, n, weights, cups, dual: true, body: Body::Check { lhs: dl, rhs: dr } });
    }

    fn hypothesis(&mut self, family: Family, weights: Vec<Weight>, cups: Vec<Arc>, note: String) {
        self.out.push(Instance { family, n: self.n, weights, cups, dual: false, body: Body::Hypothesis(note) });
    }
}

/// Every instance of the selected families in rank `n`, with duals.
pub fn relation_instances(n: usize, sel: FamilySelector) -> Result<Vec<Instance>> {
    let ws = all_weights(n)?;
    let mut b = Builder { n, out: Vec::new() };
    for fam in sel.families() {
        match fam {
            Family::Idempotent => idempotent_instances(&mut b, &ws),
            Family::Commuting => commuting_instances(&mut b, &ws)?,
            Family::NonCommuting => non_commuting_instances(&mut b, &ws)?,
            Family::DoublyNonCommuting => doubly_non_commuting_instances(&mut b, &ws)?,
            Family::SelfDualDoublyCovered | Family::SelfDualOther => self_dual_instances(&mut b, &ws, fam)?,
            Family::Adjacent => adjacent_instances(&mut b, &ws)?,
        }
    }
    Ok(b.out)
}

fn idempotent_instances(b: &mut Builder, ws: &[Weight]) {
    for mu in ws {
        for lam in ws {
            let rhs = if lam == mu { vec![Word::new(1, vec![lam.clone()])] } else { vec![] };
            b.out.push(Instance {
                family: Family::Idempotent,
                n: b.n,
                weights: vec![mu.clone(), lam.clone()],
                cups: vec![],
                dual: false,
                body: Body::Check { lhs: vec![Word::new(1, vec![mu.clone()]), Word::new(1, vec![lam.clone()])], rhs },
            });
        }
        for p in cups_of(mu) {
            let lam = sub(mu, &p);
            let path = vec![lam.clone(), lam.clone(), mu.clone(), mu.clone()];
            let gen = vec![lam.clone(), mu.clone()];
            b.check(Family::Idempotent, vec![mu.clone(), lam], vec![p], vec![Word::new(1, path)], vec![Word::new(1, gen)]);
        }
    }
}

fn commuting_instances(b: &mut Builder, ws: &[Weight]) -> Result<()> {
    for mu in ws {
        let d = cup_diagram(mu);
        let cs = cups_of(mu);
        for p in &cs {
            for q in &cs {
                if p == q || !commute(&d, p, q)? {
                    continue;
                }
                let (mp, mq) = (sub(mu, p), sub(mu, q));
                let mpq = sub(&mp, q);
                let weights = vec![mu.clone(), mp.clone(), mq.clone(), mpq.clone()];
                if p < q {
                    b.check(
                        Family::Commuting,
                        weights.clone(),
                        vec![*p, *q],
                        vec![Word::new(1, vec![mpq.clone(), mp.clone(), mu.clone()])],
                        vec![Word::new(1, vec![mpq.clone(), mq.clone(), mu.clone()])],
                    );
                }
                b.check(
                    Family::Commuting,
                    weights,
                    vec![*p, *q],
                    vec![Word::new(1, vec![mp.clone(), mu.clone(), mq.clone()])],
                    vec![Word::new(1, vec![mp, mpq, mq])],
                );
            }
        }
    }
    Ok(())
}

/// The two cups of `(μ - q)̲` adjacent to `q`, left to right.
fn flanking(mu: &Weight, q: &Arc) -> Option<(Arc, Arc)> {
    match adjacent_in(&sub(mu, q), q).as_slice() {
        [a, b] => Some((*a, *b)),
        _ => None,
    }
}

fn non_commuting_instances(b: &mut Builder, ws: &[Weight]) -> Result<()> {
    for mu in ws {
        let d = cup_diagram(mu);
        let cs = cups_of(mu);
        for p in &cs {
            for q in &cs {
                if p == q || !covers(p, q)? || commute(&d, p, q)? {
                    continue;
                }
                let (mp, mq) = (sub(mu, p), sub(mu, q));
                let Some((q1, q2)) = flanking(mu, q) else {
                    b.hypothesis(Family::NonCommuting, vec![mu.clone()], vec![*p, *q], "q is not flanked by two cups".into());
                    continue;
                };
                let lmq = sub(mu, q);
                if covers(&q1, &q2)? || covers(&q2, &q1)? || !commute(&cup_diagram(&lmq), &q1, &q2)? {
                    b.hypothesis(
                        Family::NonCommuting,
                        vec![mu.clone()],
                        vec![*p, *q, q1, q2],
                        "flanking cups are concentric or non-commuting".into(),
                    );
                    continue;
                }
                let lhs = vec![Word::new(1, vec![mp.clone(), mu.clone(), mq.clone()])];
                for qi in [q1, q2] {
                    let mid = sub(&mp, &qi);
                    b.check(
                        Family::NonCommuting,
                        vec![mu.clone(), mp.clone(), mq.clone(), mid.clone()],
                        vec![*p, *q, qi],
                        lhs.clone(),
                        vec![Word::new(1, vec![mp.clone(), mid, mq.clone()])],
                    );
                }
            }
        }
    }
    Ok(())
}

fn doubly_non_commuting_instances(b: &mut Builder, ws: &[Weight]) -> Result<()> {
    for mu in ws {
        let d = cup_diagram(mu);
        let cs = cups_of(mu);
        for p in &cs {
            for q in &cs {
                if p == q || !doubly_covers(p, q)? || commute(&d, p, q)? {
                    continue;
                }
                let (mp, mq) = (sub(mu, p), sub(mu, q));
                let Some((x, y)) = flanking(mu, q) else {
                    b.hypothesis(
                        Family::DoublyNonCommuting,
                        vec![mu.clone()],
                        vec![*p, *q],
                        "q is not flanked by two cups".into(),
                    );
                    continue;
                };
                let q2 = if covers(&x, &y)? {
                    x
                } else if covers(&y, &x)? {
                    y
                } else {
                    b.hypothesis(
                        Family::DoublyNonCommuting,
                        vec![mu.clone()],
                        vec![*p, *q, x, y],
                        "flanking cups are not concentric".into(),
                    );
                    continue;
                };
                // the middle weight is `(μ - q) - q²`; flipping `q²` in `μ - p` leaves no valid word
                let mid = sub(&mq, &q2);
                b.check(
                    Family::DoublyNonCommuting,
                    vec![mu.clone(), mp.clone(), mq.clone(), mid.clone()],
                    vec![*p, *q, q2],
                    vec![Word::new(1, vec![mp.clone(), mu.clone(), mq.clone()])],
                    vec![Word::new(1, vec![mp.clone(), mid, mq.clone()])],
                );
            }
        }
    }
    Ok(())
}

/// `p` is doubly covered by a decorated cup of `μ̲` that does not commute with it.
pub fn is_doubly_covered(mu: &Weight, p: &Arc) -> Result<bool> {
    let d = cup_diagram(mu);
    for u in d.cups() {
        if u != p && doubly_covers(u, p)? && !commute(&d, u, p)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn loop_word(coeff: i64, lam: &Weight, q: &Arc) -> Word {
    Word::new(coeff, vec![lam.clone(), sub(lam, q), lam.clone()])
}

fn self_dual_instances(b: &mut Builder, ws: &[Weight], fam: Family) -> Result<()> {
    for mu in ws {
        let d = cup_diagram(mu);
        let cs = cups_of(mu);
        for p in &cs {
            let doubly = is_doubly_covered(mu, p)?;
            if doubly != (fam == Family::SelfDualDoublyCovered) {
                continue;
            }
            let lam = sub(mu, p);
            let lam_cups = cups_of(&lam);
            let pre = sign_pow(breadth(p)? - 1);
            let mut rhs = Vec::new();
            let mut missing = None;
            for q in &cs {
                if q == p || !commute(&d, p, q)? || !(covers(q, p)? || doubly_covers(q, p)?) {
                    continue;
                }
                if !lam_cups.contains(q) {
                    missing = Some(*q);
                }
                rhs.push(loop_word(pre * 2 * sign_pow(breadth(q)?), &lam, q));
            }
            let adj = adjacent_in(&lam, p);
            let mut cups = vec![*p];
            if let Some(q) = missing {
                b.hypothesis(fam, vec![mu.clone(), lam], vec![*p, q], "commuting cup missing from λ̲".into());
                continue;
            }
            if doubly {
                let (r, t) = match adj.as_slice() {
                    [a, c] if covers(c, a)? => (*a, *c),
                    [a, c] if covers(a, c)? => (*c, *a),
                    _ => {
                        b.hypothesis(fam, vec![mu.clone(), lam], adj.clone(), "adjacent pair r ≺ t not found".into());
                        continue;
                    }
                };
                rhs.push(loop_word(pre * 2 * sign_pow(breadth(&t)?), &lam, &t));
                rhs.push(loop_word(pre * sign_pow(breadth(&r)?), &lam, &r));
                cups.extend([r, t]);
            } else {
                for r in &adj {
                    rhs.push(loop_word(pre * sign_pow(breadth(r)?), &lam, r));
                }
                cups.extend(adj.iter().copied());
            }
            let lhs = vec![Word::new(1, vec![lam.clone(), mu.clone(), lam.clone()])];
            b.check(fam, vec![mu.clone(), lam], cups, lhs, rhs);
        }
    }
    Ok(())
}

fn adjacent_instances(b: &mut Builder, ws: &[Weight]) -> Result<()> {
    for mu in ws {
        for p in cups_of(mu) {
            let lam = sub(mu, &p);
            for t in adjacent_in(&lam, &p) {
                let lt = sub(&lam, &t);
                let lhs = vec![Word::new(1, vec![lt.clone(), lam.clone(), mu.clone()])];
                let (rhs, cups, weights) = match generated_cup(mu, &p, &t)? {
                    Some(u) => {
                        let mu_u = sub(mu, &u);
                        let c = sign_pow(breadth(&u)? - breadth(&t)?);
                        (
                            vec![Word::new(c, vec![lt.clone(), mu_u.clone(), mu.clone()])],
                            vec![p, t, u],
                            vec![mu.clone(), lam.clone(), lt.clone(), mu_u],
                        )
                    }
                    None => (vec![], vec![p, t], vec![mu.clone(), lam.clone(), lt.clone()]),
                };
                b.check(Family::Adjacent, weights, cups, lhs, rhs);
            }
        }
    }
    Ok(())
}

fn eval_side(words: &[Word]) -> Result<Element> {
    let mut acc = Element::zero();
    for w in words {
        acc += &psi_path(&w.path)?.scale(w.coeff);
    }
    Ok(acc)
}

/// Evaluates one instance. The pairwise idempotent relation `1_μ 1_λ` is stored with
/// both idempotents on the left and multiplied rather than summed.
pub fn evaluate(inst: &Instance) -> Outcome {
    let mut out = Outcome {
        family: inst.family,
        n: inst.n,
        weights: inst.weights.clone(),
        cups: inst.cups.iter().map(|a| a.to_string()).collect(),
        dual: inst.dual,
        status: Status::Ok,
        lhs: None,
        rhs: None,
        note: None,
    };
    let (lhs, rhs) = match &inst.body {
        Body::Hypothesis(note) => {
            out.status = Status::HypothesisFailure;
            out.note = Some(note.clone());
            return out;
        }
        Body::Check { lhs, rhs } => (lhs, rhs),
    };
    let pairwise = inst.family == Family::Idempotent && lhs.len() == 2;
    let l = if pairwise {
        psi_path(&lhs[0].path).and_then(|a| psi_path(&lhs[1].path).and_then(|b| element_mul(&a, &b)))
    } else {
        eval_side(lhs)
    };
    match (l, eval_side(rhs)) {
        (Ok(l), Ok(r)) => {
            if l != r {
                out.status = Status::Mismatch;
                out.lhs = Some(l);
                out.rhs = Some(r);
            }
        }
        (Err(e), _) | (_, Err(e)) => {
            out.status = Status::Error;
            out.note = Some(e.to_string());
        }
    }
    out
}

/// Runs the relation suite. `jobs = 1` is single threaded; larger values use a
/// dedicated worker pool. Outcomes keep enumeration order either way.
pub fn verify_relations(n: usize, sel: FamilySelector, jobs: usize) -> Result<VerifyReport> {
    let instances = relation_instances(n, sel)?;
    let outcomes = if jobs <= 1 {
        instances.iter().map(evaluate).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Parse(format!("thread pool: {e}")))?;
        pool.install(|| instances.par_iter().map(evaluate).collect())
    };
    Ok(VerifyReport { n, outcomes })
}

// ---------------------------------------------------------------------------
// Sign constants

/// `C(p, q) = 2(2b(q) + κ(μ - q, μ) - κ(μ - p, μ))` for cups `p, q` of `μ̲`.
pub fn sign_constant_c(mu: &Weight, p: &Arc, q: &Arc) -> Result<i64> {
    remove_cup(mu, p)?;
    remove_cup(mu, q)?;
    Ok(2 * (2 * breadth(q)? + kappa_of_cup(q) - kappa_of_cup(p)))
}

/// The closed form of `C(p, q)`, evaluated in doubled x-coordinates `2j + 1`.
pub fn sign_constant_c_closed(p: &Arc, q: &Arc) -> i64 {
    let x2 = |j: usize| 2 * j as i64 + 1;
    let (lp, rp, lq, rq) = (x2(p.left()), x2(p.right()), x2(q.left()), x2(q.right()));
    if q.decorated {
        (3 * rq + 3 * lq - rp - lp) / 2
    } else {
        (3 * rq - lq - rp - lp) / 2 + 2
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub checked: usize,
    pub failures: Vec<String>,
    /// How many checks fell into each named sub-case.
    pub cases: BTreeMap<String, usize>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, s: String) {
        self.failures.push(s);
    }

    fn case(&mut self, name: &str) {
        *self.cases.entry(name.to_string()).or_insert(0) += 1;
    }
}

/// Definition against closed form for every ordered pair of cups.
pub fn check_sign_constant(n: usize) -> Result<CheckReport> {
    let mut rep = CheckReport::default();
    for mu in all_weights(n)? {
        let cs = cups_of(&mu);
        for p in &cs {
            for q in &cs {
                rep.checked += 1;
                let (a, b) = (sign_constant_c(&mu, p, q)?, sign_constant_c_closed(p, q));
                if a != b {
                    rep.fail(format!("{mu} p={p} q={q}: {a} vs {b}"));
                }
            }
        }
    }
    Ok(rep)
}

/// Both weights contractible at `k` and `p` not the contracted cup.
fn survives(mu: &Weight, lam: &Weight, p: &Arc, k: usize) -> bool {
    let (a, b) = crate::weights::contraction_positions(k);
    is_contractible(mu, k) && is_contractible(lam, k) && !(p.left() == a && p.right() == b)
}

/// The contracted cup of `Φ_k(μ)` for `λ = μ - p`, found from the contracted weights.
fn contracted_flip(mu: &Weight, lam: &Weight, k: usize) -> Result<Option<(Weight, Weight, Arc)>> {
    let (cm, cl) = (contract_weight(mu, k)?, contract_weight(lam, k)?);
    Ok(flipped_cup(&cl, &cm).map(|p| (cm, cl, p)))
}

/// Parity of `b(q) ± κ` is preserved by contraction.
pub fn check_sign_parity(n: usize) -> Result<CheckReport> {
    let mut rep = CheckReport::default();
    for mu in all_weights(n)? {
        for q in cups_of(&mu) {
            let nu = sub(&mu, &q);
            for k in 0..n {
                if !survives(&mu, &nu, &q, k) {
                    continue;
                }
                rep.checked += 1;
                let Some((_, _, q2)) = contracted_flip(&mu, &nu, k)? else {
                    rep.fail(format!("{mu} q={q} k={k}: contracted weights do not differ by a cup"));
                    continue;
                };
                if contract_cup(&mu, &q, k)? != q2 {
                    rep.fail(format!("{mu} q={q} k={k}: contract_cup gives {}, flip gives {q2}", contract_cup(&mu, &q, k)?));
                }
                let (b, c) = (breadth(&q)?, kappa_of_cup(&q));
                let (b2, c2) = (breadth(&q2)?, kappa_of_cup(&q2));
                if (b + c - b2 - c2).rem_euclid(2) != 0 || (b - c - b2 + c2).rem_euclid(2) != 0 {
                    rep.fail(format!("{mu} q={q} k={k}: b={b} κ={c}, contracted b={b2} κ={c2}"));
                }
            }
        }
    }
    Ok(rep)
}

/// `C(p, ⟨p ∪ t⟩_μ) - C(r, t)`, the second constant taken in `λ = μ - p`.
fn c_difference(mu: &Weight, p: &Arc, r: &Arc, t: &Arc) -> Result<Option<i64>> {
    let lam = sub(mu, p);
    let Some(u) = generated_cup(mu, p, t)? else {
        return Ok(None);
    };
    Ok(Some(sign_constant_c(mu, p, &u)? - sign_constant_c(&lam, r, t)?))
}

/// For contractible adjacent configurations with a generated cup, the difference of
/// sign constants agrees with its contraction modulo 8.
pub fn check_mod8_congruence(n: usize) -> Result<CheckReport> {
    let mut rep = CheckReport::default();
    for mu in all_weights(n)? {
        for p in cups_of(&mu) {
            let lam = sub(&mu, &p);
            let adj = adjacent_in(&lam, &p);
            let [a, c] = adj.as_slice() else { continue };
            for (r, t) in [(*a, *c), (*c, *a)] {
                let Some(diff) = c_difference(&mu, &p, &r, &t)? else { continue };
                for k in 0..n {
                    if !survives(&mu, &lam, &p, k) {
                        continue;
                    }
                    let tag = format!("{mu} p={p} r={r} t={t} k={k}");
                    let (Ok(r2), Ok(t2)) = (contract_cup(&lam, &r, k), contract_cup(&lam, &t, k)) else {
                        rep.checked += 1;
                        rep.fail(format!("{tag}: r or t is the contracted cup"));
                        continue;
                    };
                    rep.checked += 1;
                    let Some((cm, _, p2)) = contracted_flip(&mu, &lam, k)? else {
                        rep.fail(format!("{tag}: contracted weights do not differ by a cup"));
                        continue;
                    };
                    if k == 0 {
                        rep.case("k=0");
                    } else if let Ok(Some(u2)) = generated_cup(&cm, &p2, &t2) {
                        rep.case(if p2.left().min(u2.left()) == 0 { "leftmost vertex at 1/2" } else { "k>0" });
                    }
                    match c_difference(&cm, &p2, &r2, &t2) {
                        Ok(Some(d2)) if (diff - d2).rem_euclid(8) == 0 => {}
                        Ok(Some(d2)) => rep.fail(format!("{tag}: {diff} vs {d2}")),
                        Ok(None) => rep.fail(format!("{tag}: contracted generated cup missing")),
                        Err(e) => rep.fail(format!("{tag}: {e}")),
                    }
                }
            }
        }
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Contraction on both sides

/// The prefactor of the Hecke-side contraction on `D^λ_μ` (and its dual).
pub fn dilation_factor(p: &Arc, k: usize) -> GaussInt {
    // 0-based: `l_p < k < r_p` iff `l + 1 <= k <= r`, `⌈l_p⌉ = l + 1`, `k < l_p` iff `k <= l`.
    let (l, r) = (p.left(), p.right());
    if p.decorated && k <= 1 && k <= l {
        -GaussInt::ONE
    } else if l < k && k <= r {
        if (l + 1 + k).is_multiple_of(2) {
            GaussInt::I
        } else {
            -GaussInt::I
        }
    } else {
        GaussInt::ONE
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DilationReport {
    pub checked: usize,
    /// Generators where `Φ̃_k(Ψ(g)) ≠ Ψ(Φ_k(g))` with the prefactor table as stated.
    pub literal_failures: Vec<String>,
    /// Ratio `Φ̃_k(Ψ(g)) / Ψ(Φ_k(g))` values seen, as strings.
    pub ratios: BTreeSet<String>,
    /// Every ratio is `±1` and of the form `ε(λ)ε(μ)` for signs `ε` on the weights
    /// contractible at `k`, so the two contractions differ by an inner automorphism.
    pub gauge_equivalent: bool,
    pub gauge_failures: Vec<String>,
}

impl DilationReport {
    pub fn literal_holds(&self) -> bool {
        self.literal_failures.is_empty()
    }
}

/// Compares `Φ̃_k ∘ Ψ` with `Ψ ∘ Φ_k` on every surviving generator.
pub fn check_dilation(n: usize) -> Result<DilationReport> {
    let mut rep = DilationReport { gauge_equivalent: true, ..Default::default() };
    if n < 3 {
        return Ok(rep);
    }
    let ws = all_weights(n)?;
    for k in 0..n {
        // edges (λ, μ, ratio) per contraction point
        let mut edges: Vec<(Weight, Weight, GaussInt)> = Vec::new();
        for mu in ws.iter().filter(|w| is_contractible(w, k)) {
            for p in cups_of(mu) {
                let lam = sub(mu, &p);
                if !survives(mu, &lam, &p, k) {
                    continue;
                }
                let f = dilation_factor(&p, k);
                let (cm, cl) = (contract_weight(mu, k)?, contract_weight(&lam, k)?);
                for g in [HeckeGen::Down { lam: lam.clone(), mu: mu.clone() }, HeckeGen::Up { mu: mu.clone(), lam: lam.clone() }] {
                    rep.checked += 1;
                    let left = contract_element(&psi(&g)?, k)?;
                    let cg = HeckeGen::new(&contract_weight(g.sup(), k)?, &contract_weight(g.sub(), k)?)?;
                    let right = psi(&cg)?.scale(f);
                    if left != right {
                        rep.literal_failures.push(format!("k={k} {g} (p={p}): {left} vs {right}"));
                    }
                    let ratio = ratio_of(&left, &right);
                    match ratio {
                        Some(c) => {
                            rep.ratios.insert(c.to_string());
                            if matches!(g, HeckeGen::Down { .. }) {
                                edges.push((cl.clone(), cm.clone(), c));
                            }
                        }
                        None => {
                            rep.gauge_equivalent = false;
                            rep.gauge_failures.push(format!("k={k} {g}: not proportional"));
                        }
                    }
                }
            }
        }
        if let Err(e) = two_colour(&edges) {
            rep.gauge_equivalent = false;
            rep.gauge_failures.push(format!("k={k}: {e}"));
        }
    }
    Ok(rep)
}

/// `a / b` when both are single terms on the same triple with a unit ratio.
fn ratio_of(a: &Element, b: &Element) -> Option<GaussInt> {
    let (ta, ca) = a.terms().next()?;
    let (tb, cb) = b.terms().next()?;
    if a.len() != 1 || b.len() != 1 || ta != tb {
        return None;
    }
    [GaussInt::ONE, -GaussInt::ONE, GaussInt::I, -GaussInt::I].into_iter().find(|&u| u * cb == ca)
}

/// Finds `ε` with `ratio(λ, μ) = ε(λ)ε(μ)` on every edge, or explains why none exists.
fn two_colour(edges: &[(Weight, Weight, GaussInt)]) -> std::result::Result<(), String> {
    let mut adj: BTreeMap<&Weight, Vec<(&Weight, i64)>> = BTreeMap::new();
    for (a, b, c) in edges {
        let s = if *c == GaussInt::ONE {
            1
        } else if *c == -GaussInt::ONE {
            -1
        } else {
            return Err(format!("{a}-{b}: ratio {c} is not a sign"));
        };
        adj.entry(a).or_default().push((b, s));
        adj.entry(b).or_default().push((a, s));
    }
    let mut eps: BTreeMap<&Weight, i64> = BTreeMap::new();
    for &start in adj.keys() {
        if eps.contains_key(start) {
            continue;
        }
        eps.insert(start, 1);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &(w, s) in &adj[v] {
                let want = eps[v] * s;
                match eps.get(w) {
                    None => {
                        eps.insert(w, want);
                        queue.push_back(w);
                    }
                    Some(&e) if e != want => return Err(format!("inconsistent sign around {v}-{w}")),
                    _ => {}
                }
            }
        }
    }
    Ok(())
}

/// `Φ̃_k(xy) = Φ̃_k(x) Φ̃_k(y)` on the basis of the contractible subalgebra.
pub fn check_contraction_multiplicative(n: usize) -> Result<CheckReport> {
    let mut rep = CheckReport::default();
    if n < 3 {
        return Ok(rep);
    }
    let basis = circle_basis(n)?;
    for k in 0..n {
        let sub: Vec<&OrientedTriple> = basis.iter().filter(|t| contract_triple(t, k).is_ok()).collect();
        for a in &sub {
            for b in sub.iter().filter(|b| b.bottom == a.top) {
                rep.checked += 1;
                let lhs = contract_element(&multiply(a, b)?, k)?;
                let rhs = multiply(&contract_triple(a, k)?, &contract_triple(b, k)?)?;
                if lhs != rhs {
                    rep.fail(format!("k={k}: {a} * {b}: {lhs} vs {rhs}"));
                }
            }
        }
    }
    Ok(rep)
}

/// `(ab)c = a(bc)` on basis triples: every triple when `samples` is `None`, otherwise
/// that many composable triples drawn with a seeded generator.
pub fn check_associativity(n: usize, samples: Option<usize>, seed: u64) -> Result<CheckReport> {
    let basis = circle_basis(n)?;
    let mut rep = CheckReport::default();
    let mut check = |a: &OrientedTriple, b: &OrientedTriple, c: &OrientedTriple| -> Result<()> {
        rep.checked += 1;
        let left = element_mul(&multiply(a, b)?, &Element::basis(c.clone()))?;
        let right = element_mul(&Element::basis(a.clone()), &multiply(b, c)?)?;
        if left != right {
            rep.fail(format!("({a})({b})({c}): {left} vs {right}"));
        }
        Ok(())
    };
    match samples {
        None => {
            for a in &basis {
                for b in &basis {
                    for c in &basis {
                        check(a, b, c)?;
                    }
                }
            }
        }
        Some(count) => {
            let mut by_bottom: BTreeMap<&Weight, Vec<&OrientedTriple>> = BTreeMap::new();
            for t in &basis {
                by_bottom.entry(&t.bottom).or_default().push(t);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let a = &basis[rng.random_range(0..basis.len())];
                let bs = &by_bottom[&a.top];
                let b = bs[rng.random_range(0..bs.len())];
                let cs = &by_bottom[&b.top];
                let c = cs[rng.random_range(0..cs.len())];
                check(a, b, c)?;
            }
        }
    }
    Ok(rep)
}

/// Whether `μ̲λ` oriented forces `λ ≤ μ` in the tile order. Reported, not asserted.
pub fn check_triangularity(n: usize) -> Result<CheckReport> {
    let mut rep = CheckReport::default();
    let ws = all_weights(n)?;
    for mu in &ws {
        let d = cup_diagram(mu);
        for lam in ws.iter().filter(|l| is_oriented(&d, l)) {
            rep.checked += 1;
            if !bruhat_leq(&weight_to_partition(lam), &weight_to_partition(mu)) {
                rep.fail(format!("{lam} oriented by {mu} but not below it"));
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Weight {
        s.parse().unwrap()
    }

    #[test]
    fn psi_examples() {
        let e = psi(&HeckeGen::Idempotent(w("vv"))).unwrap();
        assert_eq!(e, Element::basis("vv,vv,vv".parse().unwrap()));
        let g = HeckeGen::new(&w("vv"), &w("^^")).unwrap();
        assert!(matches!(g, HeckeGen::Down { .. }));
        let e = psi(&g).unwrap();
        assert_eq!(e, Element::term(GaussInt::I, "vv,vv,^^".parse().unwrap()));
        let d = psi(&g.dual()).unwrap();
        assert_eq!(d, Element::term(GaussInt::I, "^^,vv,vv".parse().unwrap()));
        for (t, _) in e.terms().chain(d.terms()) {
            assert_eq!(t.degree(), 1);
        }
    }

    #[test]
    fn generator_validation() {
        assert!(HeckeGen::new(&w("vvvv"), &w("^^^^")).is_err());
        assert!(HeckeGen::new(&w("vv"), &w("vvvv")).is_err());
        let g = HeckeGen::new(&w("^^v^v^"), &w("^^^vv^")).unwrap();
        assert_eq!(g.dual().dual(), g);
        assert_eq!(g.cup().map(|a| (a.left(), a.right())), Some((2, 3)));
    }

    #[test]
    fn kl_examples() {
        assert_eq!(kl_poly(&w("vv"), &w("^^")).unwrap().to_string(), "q^1");
        assert!(kl_poly(&w("^^"), &w("vv")).unwrap().value.is_zero());
        for mu in all_weights(5).unwrap() {
            assert_eq!(kl_poly(&mu, &mu).unwrap().value, LaurentPoly::monomial(1, 0));
        }
    }

    #[test]
    fn kl_degree_two() {
        // two nested clockwise cups
        assert_eq!(kl_poly(&w("^^vv"), &w("vv^^")).unwrap().value, LaurentPoly::monomial(1, 2));
    }

    #[test]
    fn cells_small() {
        let c1 = cell_triples(1).unwrap();
        assert_eq!(c1.len(), 1);
        assert_eq!(c1[0].degree, 0);
        let mut p = LaurentPoly::zero();
        p.add_term(2, 0);
        p.add_term(2, 1);
        p.add_term(1, 2);
        assert_eq!(poincare_cells(2).unwrap(), p);
        assert_eq!(poincare_circles(2).unwrap(), p);
    }

    #[test]
    fn kl_support_is_in_cells() {
        let cells: BTreeSet<(Weight, Weight)> =
            cell_triples(4).unwrap().into_iter().map(|c| (c.mu, c.lam)).collect();
        for mu in all_weights(4).unwrap() {
            for lam in all_weights(4).unwrap() {
                if !kl_poly(&lam, &mu).unwrap().value.is_zero() {
                    assert!(cells.contains(&(mu.clone(), lam)));
                }
            }
        }
    }

    #[test]
    fn sandwich_keeps_matching_terms() {
        let cells = cell_triples(3).unwrap();
        let x = &cells[cells.len() / 2];
        let left = CellTriple { mu: x.mu.clone(), lam: x.mu.clone(), nu: x.mu.clone(), degree: 0 };
        let right = CellTriple { mu: x.nu.clone(), lam: x.nu.clone(), nu: x.nu.clone(), degree: 0 };
        let lx = hecke_product(&left, x).unwrap();
        assert_eq!(lx, Element::basis(x.to_oriented().unwrap()));
        let other = cells.iter().find(|c| c.mu == c.nu && c.mu == c.lam && c.mu != x.nu).unwrap();
        assert!(hecke_product(x, other).unwrap().is_zero());
        assert_eq!(hecke_product(x, &right).unwrap(), lx);
    }

    #[test]
    fn degenerate_self_dual_is_zero() {
        let inst = relation_instances(2, FamilySelector::One(Family::SelfDualOther)).unwrap();
        let one = inst.iter().find(|i| i.weights[0] == w("^^") && !i.dual).unwrap();
        let Body::Check { rhs, .. } = &one.body else { panic!() };
        assert!(rhs.is_empty());
        assert!(psi_path(&[w("vv"), w("^^"), w("vv")]).unwrap().is_zero());
        assert_eq!(evaluate(one).status, Status::Ok);
    }

    #[test]
    fn adjacent_absent_generated_cup() {
        let inst = relation_instances(4, FamilySelector::One(Family::Adjacent)).unwrap();
        let zero: Vec<&Instance> = inst
            .iter()
            .filter(|i| matches!(&i.body, Body::Check { rhs, .. } if rhs.is_empty()))
            .collect();
        assert!(!zero.is_empty());
        for i in zero {
            assert_eq!(evaluate(i).status, Status::Ok, "{:?}", i);
        }
    }

    #[test]
    fn relations_small() {
        for n in 1..=4 {
            let rep = verify_relations(n, FamilySelector::All, 1).unwrap();
            let bad: Vec<String> = rep.failures().map(|o| o.to_string()).collect();
            assert!(bad.is_empty(), "n={n}:\n{}", bad.join("\n"));
        }
    }

    #[test]
    fn every_family_is_exercised() {
        let rep = verify_relations(5, FamilySelector::All, 2).unwrap();
        let counts = rep.counts();
        for f in Family::ALL {
            assert!(counts.get(&f).copied().unwrap_or(0) > 0, "{f} has no instances at n=5");
        }
        assert_eq!(rep.mismatches(), 0);
    }

    #[test]
    fn sign_constants() {
        for n in 1..=6 {
            let r = check_sign_constant(n).unwrap();
            assert!(r.passed(), "{:?}", r.failures);
        }
        let mu = w("v^v^");
        let (p, q) = (Arc::cup(0, 1, false), Arc::cup(2, 3, false));
        // 3·3.5 - 2.5 - 1.5 - 0.5 + 2
        assert_eq!(sign_constant_c(&mu, &p, &q).unwrap(), 8);
    }

    #[test]
    fn sign_parity_and_mod8() {
        for n in 3..=6 {
            let r = check_sign_parity(n).unwrap();
            assert!(r.passed(), "{:?}", r.failures);
            let r = check_mod8_congruence(n).unwrap();
            assert!(r.passed(), "{:?}", r.failures);
        }
        let r = check_mod8_congruence(6).unwrap();
        assert!(r.cases["k=0"] > 0 && r.cases["leftmost vertex at 1/2"] > 0, "{:?}", r.cases);
    }

    #[test]
    fn contractions_agree_up_to_sign_gauge() {
        for n in 3..=5 {
            let d = check_dilation(n).unwrap();
            assert!(d.gauge_equivalent, "{:?}", d.gauge_failures);
            assert!(d.ratios.iter().all(|r| r == "1" || r == "-1"));
            assert!(check_contraction_multiplicative(n).unwrap().passed());
        }
    }

    proptest! {
        #[test]
        fn psi_dual_is_transpose(n in 2usize..9, seed in any::<u64>()) {
            let ws = all_weights(n).unwrap();
            let mu = &ws[(seed as usize) % ws.len()];
            for p in cups_of(mu) {
                let g = HeckeGen::Down { lam: sub(mu, &p), mu: mu.clone() };
                let (a, b) = (psi(&g).unwrap(), psi(&g.dual()).unwrap());
                let (ta, ca) = a.terms().next().unwrap();
                let (tb, cb) = b.terms().next().unwrap();
                prop_assert_eq!(ca, cb);
                prop_assert_eq!(&ta.bottom, &tb.top);
                prop_assert_eq!(&ta.top, &tb.bottom);
                prop_assert_eq!(ta.degree(), 1);
                prop_assert_eq!(HeckeGen::new(g.sup(), g.sub()).unwrap(), g.clone());
            }
        }
    }

    #[test]
    fn dilation_factor_table() {
        assert_eq!(dilation_factor(&Arc::cup(2, 3, true), 0), -GaussInt::ONE);
        assert_eq!(dilation_factor(&Arc::cup(2, 3, true), 1), -GaussInt::ONE);
        assert_eq!(dilation_factor(&Arc::cup(3, 4, true), 2), GaussInt::ONE);
        // l_p = 0.5, k = 1: ⌈l_p⌉ - k = 0
        assert_eq!(dilation_factor(&Arc::cup(0, 3, false), 1), GaussInt::I);
        assert_eq!(dilation_factor(&Arc::cup(0, 5, false), 2), -GaussInt::I);
        assert_eq!(dilation_factor(&Arc::cup(0, 1, false), 3), GaussInt::ONE);
    }
}
