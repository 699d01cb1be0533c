//! Hot-path benchmarks: τ-table expansion, multiplicative extension,
//! Dirichlet convolution, Rankin–Selberg local coefficients, discrepancy
//! scans, and the Mellin cutoff.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use bvlab_core::dirichlet::{build_sieve, dirichlet_convolve, lambda_table, CoefficientTable, Role};
use bvlab_core::lfunc::{VEvaluator, VKernel};
use bvlab_core::localcoeffs::{compute_tau_table, random_unit_satake, rs_lambda_pk, ExemplarName, ExemplarPi};
use bvlab_core::sieve::bv_discrepancy;

fn bench_tau(c: &mut Criterion) {
    c.bench_function("tau_table_100k", |b| {
        b.iter(|| compute_tau_table(100_000).unwrap())
    });
}

fn bench_tables(c: &mut Criterion) {
    let tau = Arc::new(compute_tau_table(100_000).unwrap());
    let pi = ExemplarPi::from_tau(ExemplarName::Delta, tau);
    let sieve = build_sieve(100_000).unwrap();
    c.bench_function("lambda_table_100k", |b| {
        b.iter(|| lambda_table(&pi, 100_000, &sieve).unwrap())
    });

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let table: Vec<Complex64> = (0..=20_000)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
        .collect();
    let f = CoefficientTable::from_values(Role::Custom, table.clone());
    let g = CoefficientTable::from_values(Role::Custom, table);
    c.bench_function("dirichlet_convolve_20k", |b| {
        b.iter(|| dirichlet_convolve(&f, &g).unwrap())
    });
}

fn bench_rs_local(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    c.bench_function("rs_lambda_n4_k8", |b| {
        b.iter_batched(
            || random_unit_satake(&mut rng, 4),
            |s| (0..=8).map(|k| rs_lambda_pk(&s, k)).sum::<f64>(),
            BatchSize::SmallInput,
        )
    });
}

fn bench_discrepancy(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let table = CoefficientTable::from_values(
        Role::Custom,
        (0..=100_000)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
            .collect(),
    );
    c.bench_function("bv_discrepancy_1e5_q20", |b| {
        b.iter(|| bv_discrepancy(&table, 1e5, 20.0))
    });
}

fn bench_cutoff(c: &mut Criterion) {
    c.bench_function("v_evaluator_build", |b| {
        b.iter(|| VEvaluator::new(Complex64::new(0.5, 0.0), VKernel::flat()))
    });
    let ev = VEvaluator::new(Complex64::new(0.5, 0.0), VKernel::flat());
    c.bench_function("v_grid_build", |b| b.iter(|| ev.grid(1e-4)));
}

criterion_group!(
    benches,
    bench_tau,
    bench_tables,
    bench_rs_local,
    bench_discrepancy,
    bench_cutoff
);
criterion_main!(benches);
