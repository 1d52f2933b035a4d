use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nahm_core::qseries::Length;
use nahm_core::{congruence_product, pochhammer, rat, theta_series, QSeries};

fn euler(order: i64) -> QSeries {
    pochhammer(&rat(1, 1), &rat(1, 1), Length::Infinite, &rat(order, 1)).unwrap()
}

fn products(c: &mut Criterion) {
    let mut g = c.benchmark_group("series");
    for order in [200, 1000] {
        let o = rat(order, 1);
        g.bench_with_input(BenchmarkId::new("euler", order), &o, |b, o| {
            b.iter(|| pochhammer(&rat(1, 1), &rat(1, 1), Length::Infinite, black_box(o)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("rogers_ramanujan_product", order), &o, |b, o| {
            b.iter(|| congruence_product(1, 5, &[1, 4], -1, black_box(o)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("theta", order), &o, |b, o| {
            b.iter(|| theta_series(&rat(1, 1), &rat(0, 1), &rat(0, 1), black_box(o)).unwrap())
        });
    }
    g.finish();
}

fn arithmetic(c: &mut Criterion) {
    let mut g = c.benchmark_group("arithmetic");
    for order in [200, 1000] {
        let e = euler(order);
        let o = rat(order, 1);
        g.bench_with_input(BenchmarkId::new("mul", order), &e, |b, e| b.iter(|| black_box(e).mul(e)));
        g.bench_with_input(BenchmarkId::new("inverse", order), &e, |b, e| {
            b.iter(|| black_box(e).inverse(&o).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, products, arithmetic);
criterion_main!(benches);
