use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nahm_bench::{quadruple, PAIRS};
use nahm_core::analysis::{saddle_central_charge, solve_nahm_equation, DEFAULT_TOL};
use nahm_core::{nahm_sum, rat, LatticeConstraint};

fn enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("nahm_sum");
    g.sample_size(10);
    for &(x, y, order) in PAIRS {
        let q = quadruple(x, y);
        let o = rat(order, 1);
        g.bench_with_input(BenchmarkId::new(format!("{x},{y}"), order), &q, |b, q| {
            b.iter(|| nahm_sum(black_box(q), &o, None).unwrap())
        });
    }
    g.finish();
}

fn constrained(c: &mut Criterion) {
    let q = quadruple("T2", "T1");
    let cons = LatticeConstraint::new(vec![1, 0], 2, 0).unwrap();
    let o = rat(100, 1);
    c.bench_function("nahm_sum/T2,T1 even", |b| {
        b.iter(|| nahm_sum(black_box(&q), &o, Some(&cons)).unwrap())
    });
}

fn saddle(c: &mut Criterion) {
    let mut g = c.benchmark_group("saddle");
    for (x, y) in [("T1", "E8"), ("E8", "T1"), ("A4", "A4"), ("F4", "G2")] {
        let q = quadruple(x, y);
        g.bench_function(format!("{x},{y}"), |b| {
            b.iter(|| saddle_central_charge(black_box(&q.a), &q.d).unwrap())
        });
        g.bench_function(format!("solve {x},{y}"), |b| {
            b.iter(|| solve_nahm_equation(black_box(&q.a), DEFAULT_TOL).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, enumeration, constrained, saddle);
criterion_main!(benches);
