use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dkhov::arc_algebra::multiply;
use dkhov::hecke::{verify_relations, FamilySelector};
use dkhov::{circle_basis, OrientedTriple};

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

fn basis(c: &mut Criterion) {
    let mut g = c.benchmark_group("circle_basis");
    for n in [4, 6, 8] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| circle_basis(black_box(n))));
    }
    g.finish();
}

fn products(c: &mut Criterion) {
    let mut g = c.benchmark_group("all_products");
    g.sample_size(20);
    for n in [3, 4, 5] {
        let pairs = composable(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &pairs, |b, pairs| {
            b.iter(|| {
                for (x, y) in pairs {
                    black_box(multiply(x, y).unwrap());
                }
            })
        });
    }
    g.finish();
}

fn relations(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify_relations");
    g.sample_size(10);
    for n in [4, 5, 6] {
        g.bench_with_input(BenchmarkId::new("serial", n), &n, |b, &n| {
            b.iter(|| verify_relations(n, FamilySelector::All, 1).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("jobs8", n), &n, |b, &n| {
            b.iter(|| verify_relations(n, FamilySelector::All, 8).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, basis, products, relations);
criterion_main!(benches);
