//! Acceptance run: one PASS/FAIL line per criterion, exact tolerance throughout.
//! Run with `cargo test -p dkhov --test acceptance -- --nocapture` to see the lines.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use dkhov::arc_algebra::{
    admissible_cups, element_mul, generation_check, local_idempotent_fast_path, local_idempotent_level,
    product_diagrams, resolve, surgery, unit, admissible_next, SurgeryKind, SurgeryOutcome,
};
use dkhov::hecke::{
    check_associativity, check_contraction_multiplicative, check_dilation, check_mod8_congruence, check_sign_parity,
    poincare_cells, poincare_circles, verify_relations, FamilySelector,
};
use dkhov::{all_weights, cell_triples, circle_basis, multiply, Element, GaussInt, LaurentPoly, OrientedTriple, StackedDiagram, Weight};

struct Line {
    id: u8,
    pass: bool,
    detail: String,
}

fn w(s: &str) -> Weight {
    s.parse().unwrap()
}

fn composable(n: usize) -> Vec<(OrientedTriple, OrientedTriple)> {
    let basis = circle_basis(n).unwrap();
    let mut out = Vec::new();
    for a in &basis {
        for b in basis.iter().filter(|b| b.bottom == a.top) {
            out.push((a.clone(), b.clone()));
        }
    }
    out
}

fn step(d: &StackedDiagram, l: usize, r: usize) -> SurgeryOutcome {
    surgery(d, d.middle_index(l, r).expect("middle cup")).unwrap()
}

fn surgery_fixtures() -> Line {
    let mut ok = true;
    let start = Instant::now();
    let d = StackedDiagram::new(&w("^v^v^v^^^v"), &w("^v^^v^v^^v"), &w("v^^vv^^^v^"), &w("^v^v^v^^^v"), &w("^v^v^v^^^v"))
        .unwrap();

    // merge, merge, split: each a single term
    let o = step(&d, 2, 7);
    ok &= o.kind == SurgeryKind::Merge && o.terms.len() == 1 && o.terms[0].0 == 1;
    ok &= o.terms[0].1.w0() == d.w0() && o.terms[0].1.w1() == d.w1();
    let d1 = o.terms[0].1.clone();
    let o = step(&d1, 3, 6);
    ok &= o.kind == SurgeryKind::Merge && o.terms.len() == 1 && o.terms[0].0 == 1;
    ok &= o.terms[0].1.w1() == w("^v^^v^v^^v");
    let d2 = o.terms[0].1.clone();
    let o = step(&d2, 4, 5);
    ok &= o.kind == SurgeryKind::Split && o.terms.len() == 1 && o.terms[0].0 == -1;
    let d3 = o.terms[0].1.clone();

    // the two-term split
    let o = step(&d3, 0, 1);
    let got: BTreeMap<(Weight, Weight), i64> = o.terms.iter().map(|(c, x)| ((x.w0(), x.w1()), *c)).collect();
    let (a, b) = (w("^^v^v^v^^v"), w("vv^^v^vv^v"));
    ok &= o.kind == SurgeryKind::Split && got == BTreeMap::from([((a.clone(), a), -1), ((b.clone(), b), -1)]);

    // reconnect kills every term
    for (_, d4) in &o.terms {
        let z = step(d4, 8, 9);
        ok &= z.kind == SurgeryKind::Reconnect && z.terms.is_empty();
    }

    // forced first surgery on the decorated middle cup, then a two-term result
    let x = Weight::parse_any_parity("^v^^").unwrap();
    let m = Weight::parse_any_parity("v^^^").unwrap();
    let d = StackedDiagram::new(&x, &x, &m, &x, &x).unwrap();
    ok &= admissible_cups(&d) == vec![d.middle_index(2, 3).unwrap()];
    let r = resolve(d, admissible_next).unwrap();
    let want: Element = [("vv^v", -1), ("^^v^", -1)]
        .into_iter()
        .map(|(o, c)| {
            let o = Weight::parse_any_parity(o).unwrap();
            (OrientedTriple { bottom: x.clone(), orient: o, top: x.clone() }, GaussInt::from(c))
        })
        .collect();
    ok &= r == want;
    let t = start.elapsed();
    ok &= t < Duration::from_secs(1);
    Line { id: 1, pass: ok, detail: format!("surgery fixtures reproduced sign-for-sign in {t:?}") }
}

fn relations() -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 1..=6 {
        let rep = verify_relations(n, FamilySelector::All, 1).unwrap();
        ok &= rep.mismatches() == 0;
        for o in rep.failures().take(5) {
            println!("    {o}");
        }
        parts.push(format!("n={n}:{}/{}", rep.checked() - rep.mismatches(), rep.checked()));
    }
    let counts = verify_relations(6, FamilySelector::All, 1).unwrap().counts();
    ok &= counts.len() == 7;
    let t = Instant::now();
    verify_relations(6, FamilySelector::All, 1).unwrap();
    let serial = t.elapsed();
    let t = Instant::now();
    let par = verify_relations(6, FamilySelector::All, 8).unwrap();
    let parallel = t.elapsed();
    ok &= par.mismatches() == 0 && serial < Duration::from_secs(600) && parallel < Duration::from_secs(120);
    Line {
        id: 2,
        pass: ok,
        detail: format!("relation suite with duals, {} ; n=6 serial {serial:?}, 8 workers {parallel:?}", parts.join(" ")),
    }
}

fn associativity() -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 1..=4 {
        let r = check_associativity(n, None, 0).unwrap();
        ok &= r.passed();
        parts.push(format!("n={n}:{} exhaustive", r.checked));
    }
    for n in [5, 6] {
        let r = check_associativity(n, Some(10_000), 0x5eed + n as u64).unwrap();
        ok &= r.passed() && r.checked == 10_000;
        for f in r.failures.iter().take(3) {
            println!("    {f}");
        }
        parts.push(format!("n={n}:{} sampled", r.checked));
    }
    Line { id: 3, pass: ok, detail: format!("associativity {}", parts.join(", ")) }
}

fn unit_and_idempotents() -> Line {
    let mut ok = true;
    let mut count = 0;
    for n in 1..=5 {
        for lam in all_weights(n).unwrap() {
            let e = OrientedTriple::idempotent(&lam);
            ok &= multiply(&e, &e).unwrap() == Element::basis(e.clone());
        }
        let one = unit(n).unwrap();
        for b in circle_basis(n).unwrap() {
            count += 1;
            let x = Element::basis(b);
            ok &= element_mul(&one, &x).unwrap() == x && element_mul(&x, &one).unwrap() == x;
        }
    }
    Line { id: 4, pass: ok, detail: format!("e^2 = e and two-sided unit on {count} basis elements, n <= 5") }
}

fn grading() -> Line {
    let mut ok = true;
    let mut count = 0;
    for n in 1..=5 {
        for (a, b) in composable(n) {
            for (t, _) in multiply(&a, &b).unwrap().terms() {
                count += 1;
                ok &= t.degree() == a.degree() + b.degree();
            }
        }
    }
    Line { id: 5, pass: ok, detail: format!("{count} product terms have additive degree, n <= 5") }
}

fn orientability() -> Line {
    let mut ok = true;
    let mut seen = BTreeSet::new();
    for n in 1..=4 {
        for (a, b) in composable(n) {
            for d in product_diagrams(&a, &b).unwrap() {
                if seen.insert(d.to_string()) {
                    ok &= d.orientable() == d.orientable_brute_force();
                }
            }
        }
    }
    Line { id: 6, pass: ok, detail: format!("parity rule matches exhaustive search on {} stacked diagrams, n <= 4", seen.len()) }
}

fn local_idempotent() -> Line {
    let mut ok = true;
    let mut count = 0;
    for n in 1..=4 {
        for (a, b) in composable(n) {
            for d in product_diagrams(&a, &b).unwrap() {
                for i in d.intact_cups() {
                    let s = d.alpha().arcs()[i];
                    if local_idempotent_level(&d, &s).is_some() {
                        count += 1;
                        ok &= local_idempotent_fast_path(&d, i).unwrap() == surgery(&d, i).unwrap().terms;
                    }
                }
            }
        }
    }
    ok &= count > 0;
    Line { id: 7, pass: ok, detail: format!("fast path equals surgery on {count} instances, n <= 4") }
}

fn contraction() -> Line {
    let mut sub_ok = true;
    let mut notes = Vec::new();
    let mut mult = 0;
    for n in 3..=5 {
        let r = check_contraction_multiplicative(n).unwrap();
        sub_ok &= r.passed();
        mult += r.checked;
    }
    notes.push(format!("multiplicative on {mult} products"));
    let (mut gens, mut literal_bad) = (0, 0);
    let mut gauge = true;
    for n in 3..=6 {
        let d = check_dilation(n).unwrap();
        gens += d.checked;
        literal_bad += d.literal_failures.len();
        gauge &= d.gauge_equivalent;
        if n == 4 {
            for f in d.literal_failures.iter().take(2) {
                println!("    literal square: {f}");
            }
        }
    }
    notes.push(format!("literal prefactor square {}/{} generators", gens - literal_bad, gens));
    notes.push(format!("equal up to a sign gauge: {gauge}"));
    let (mut par, mut m8) = (0, 0);
    let mut cases: BTreeMap<String, usize> = BTreeMap::new();
    for n in 3..=7 {
        let r = check_sign_parity(n).unwrap();
        sub_ok &= r.passed();
        par += r.checked;
        let r = check_mod8_congruence(n).unwrap();
        sub_ok &= r.passed();
        m8 += r.checked;
        for (k, v) in r.cases {
            *cases.entry(k).or_insert(0) += v;
        }
    }
    sub_ok &= cases.len() == 3;
    notes.push(format!("b ± κ parity {par} cases, mod 8 {m8} cases {cases:?}"));
    let literal = literal_bad == 0;
    // The literal square is a documented deviation; the rest must hold and the two
    // contractions must agree up to conjugation by a diagonal sign.
    assert!(sub_ok && gauge, "criterion 8 sub-checks: {}", notes.join("; "));
    Line { id: 8, pass: sub_ok && gauge && literal, detail: notes.join("; ") }
}

fn dimensions() -> Line {
    let mut ok = true;
    for n in 1..=7 {
        ok &= poincare_cells(n).unwrap() == poincare_circles(n).unwrap();
        let cells: BTreeSet<OrientedTriple> = cell_triples(n).unwrap().iter().map(|c| c.to_oriented().unwrap()).collect();
        let circles: BTreeSet<OrientedTriple> = circle_basis(n).unwrap().into_iter().collect();
        ok &= cells == circles;
    }
    let mut two = LaurentPoly::zero();
    for (c, e) in [(2, 0), (2, 1), (1, 2)] {
        two.add_term(c, e);
    }
    ok &= poincare_cells(2).unwrap() == two;
    Line { id: 9, pass: ok, detail: format!("graded dimensions agree n <= 7; n=2 gives {}", poincare_cells(2).unwrap()) }
}

fn generation() -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 1..=4 {
        let r = generation_check(n).unwrap();
        ok &= r.spans();
        parts.push(format!("n={n}:{}/{}", r.rank, r.dimension));
    }
    Line { id: 10, pass: ok, detail: format!("degree <= 1 elements generate, rank {}", parts.join(" ")) }
}

#[test]
fn acceptance() {
    let runs: [fn() -> Line; 10] = [
        surgery_fixtures,
        relations,
        associativity,
        unit_and_idempotents,
        grading,
        orientability,
        local_idempotent,
        contraction,
        dimensions,
        generation,
    ];
    let mut lines = Vec::new();
    for run in runs {
        let l = run();
        println!("criterion {:>2}: {} {}", l.id, if l.pass { "PASS" } else { "FAIL" }, l.detail);
        lines.push(l);
    }
    let unexpected: Vec<u8> = lines.iter().filter(|l| !l.pass && l.id != 8).map(|l| l.id).collect();
    assert!(unexpected.is_empty(), "failing criteria: {unexpected:?}");
    // Criterion 8 fails only through the literal prefactor square (see README); if
    // that ever starts to hold, the known-deviation note needs revisiting.
    assert!(!lines[7].pass, "criterion 8 now passes literally; update the documented deviation");
}
