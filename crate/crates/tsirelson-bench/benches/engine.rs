//! Benchmarks for the norm engine, fundamental-function tables, and the
//! dual-ball oracle.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use tsirelson::scalar::ratio;
use tsirelson::norm::PROBE_FRAC_BITS;
use tsirelson::{lambda_dyadic_bounds, lambda_table, norm, oracle_norm, Budget, FinVec};
use tsirelson_bench::{log_weight_space, mixed_cardinality_space, tsirelson_space};

fn bench_norm(c: &mut Criterion) {
    let budget = Budget::default();
    let schreier = tsirelson_space();
    let ones = FinVec::segment_ones(1, 24).unwrap();
    c.bench_function("norm/schreier-half/ones-1-24", |b| {
        b.iter(|| norm(black_box(&schreier), black_box(&ones), 64, &budget).unwrap())
    });

    let mixed = mixed_cardinality_space();
    let ragged = FinVec::from_entries(
        (1u32..=20).map(|i| (i, ratio(1 + i64::from(i % 5), 1 + i64::from(i % 7)))),
    )
    .unwrap();
    c.bench_function("norm/mixed-a2-a3/ragged-1-20", |b| {
        b.iter(|| norm(black_box(&mixed), black_box(&ragged), 64, &budget).unwrap())
    });
}

fn bench_lambda(c: &mut Criterion) {
    let budget = Budget::default();
    let mixed = mixed_cardinality_space();
    c.bench_function("lambda/weight-recursion/mixed-128", |b| {
        b.iter(|| lambda_table(black_box(&mixed), 128, 64, &budget).unwrap())
    });

    let log_space = log_weight_space();
    c.bench_function("lambda/dyadic-bounds/log-weights-512", |b| {
        b.iter(|| lambda_dyadic_bounds(black_box(&log_space), 512, PROBE_FRAC_BITS, &budget).unwrap())
    });
}

fn bench_oracle(c: &mut Criterion) {
    let budget = Budget::default();
    let schreier = tsirelson_space();
    let x = FinVec::from_entries((1u32..=8).map(|i| (i, ratio(i64::from(9 - i), 9)))).unwrap();
    c.bench_function("dual-oracle/schreier-half/support-8", |b| {
        b.iter(|| oracle_norm(black_box(&schreier), black_box(&x), 64, &budget).unwrap())
    });
}

criterion_group!(benches, bench_norm, bench_lambda, bench_oracle);
criterion_main!(benches);
