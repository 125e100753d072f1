use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use margulis_bench::{cocycle, sphere, torus, word};
use margulis_core::{build_halfspaces, enumerate_classes, margin_lp, quadrature_check};
use nalgebra::DVector;
use std::hint::black_box;

fn alpha(c: &mut Criterion) {
    let mut g = c.benchmark_group("alpha");
    for r in [1, 3] {
        let s = sphere(r);
        let u = cocycle(&s);
        for n in [4, 8, 12] {
            let w = word(n);
            g.bench_with_input(BenchmarkId::new(format!("r{r}"), n), &w, |b, w| {
                b.iter(|| s.alpha(&u, black_box(w)).unwrap())
            });
        }
    }
    g.finish();
}

fn enumeration(c: &mut Criterion) {
    c.bench_function("enumerate_classes/k2_L10", |b| {
        b.iter(|| enumerate_classes(2, black_box(10)))
    });
}

fn halfspaces(c: &mut Criterion) {
    let s = sphere(1);
    let mut g = c.benchmark_group("build_halfspaces");
    g.sample_size(20);
    for l in [6, 8] {
        g.bench_with_input(BenchmarkId::from_parameter(l), &l, |b, &l| {
            b.iter(|| build_halfspaces(&s, l, false).unwrap())
        });
    }
    g.finish();
}

fn lp(c: &mut Criterion) {
    let mut g = c.benchmark_group("margin_lp");
    g.sample_size(20);
    for (name, s) in [("sphere", sphere(1)), ("torus", torus())] {
        let h = build_halfspaces(&s, 8, false).unwrap();
        g.bench_function(name, |b| b.iter(|| margin_lp(black_box(&h), 1).unwrap()));
    }
    g.finish();
}

fn quadrature(c: &mut Criterion) {
    let s = sphere(1);
    let u = cocycle(&s);
    let w = word(6);
    let p = DVector::from_vec(vec![0.3, -0.2, 0.5]);
    c.bench_function("quadrature/1e4_steps", |b| {
        b.iter(|| quadrature_check(&s, &u, &w, 10_000, black_box(&p)).unwrap())
    });
}

criterion_group!(benches, alpha, enumeration, halfspaces, lp, quadrature);
criterion_main!(benches);
