//! Benchmarks for the numeric hot paths: closed-form matrices, the quadrature
//! oracle, sparse row sums, exact soft-threshold moments and the Monte Carlo
//! moment harness.

use bvbounds::divergences::{numeric_divergence_oracle, DivergenceKind, OracleBudget};
use bvbounds::estimators::{exact_soft_threshold_moments, mc_moments, EstimatorSpec};
use bvbounds::infomatrices::{chi2_matrix, sparse_chi2_row_sum};
use bvbounds::models::{Family, FamilyParams};
use bvbounds::RngStream;
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn bench_chi2_matrix(c: &mut Criterion) {
    let fam = Family::IsoNormal { sigma: 1.0 };
    let params: Vec<FamilyParams> = (0..6)
        .map(|i| FamilyParams::vector(vec![0.1 * i as f64, -0.05 * i as f64, 0.02 * i as f64]))
        .collect();
    c.bench_function("chi2_matrix 5x5 normal d=3", |b| {
        b.iter(|| chi2_matrix(black_box(&fam), black_box(&params)).unwrap())
    });
}

fn bench_quadrature_oracle(c: &mut Criterion) {
    let fam = Family::IsoNormal { sigma: 1.0 };
    let p = FamilyParams::vector(vec![1.0]);
    let q = FamilyParams::vector(vec![0.0]);
    let budget = OracleBudget::default();
    c.bench_function("quadrature oracle chi2 normal", |b| {
        b.iter(|| {
            numeric_divergence_oracle(DivergenceKind::Chi2, black_box(&fam), &p, &q, &budget)
                .unwrap()
        })
    });
}

fn bench_sparse_row_sum(c: &mut Criterion) {
    c.bench_function("sparse_chi2_row_sum n=10^6 s=5", |b| {
        b.iter(|| sparse_chi2_row_sum(black_box(1_000_000), 5, 0.2).unwrap())
    });
}

fn bench_soft_threshold_moments(c: &mut Criterion) {
    c.bench_function("exact_soft_threshold_moments", |b| {
        b.iter(|| exact_soft_threshold_moments(black_box(1.3), black_box(0.7)))
    });
}

fn bench_mc_moments(c: &mut Criterion) {
    let fam = Family::IsoNormal { sigma: 1.0 };
    let spec = EstimatorSpec::JamesStein;
    let params = FamilyParams::vector(vec![0.3; 8]);
    c.bench_function("mc_moments james-stein m=8 32k reps", |b| {
        b.iter(|| mc_moments(&spec, &fam, &params, 32_000, RngStream::new(7)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_chi2_matrix,
    bench_quadrature_oracle,
    bench_sparse_row_sum,
    bench_soft_threshold_moments,
    bench_mc_moments
);
criterion_main!(benches);
