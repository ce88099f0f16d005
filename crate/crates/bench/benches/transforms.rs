use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use torus_wigner::{
    build_baker, propagator_columns, wigner_propagator_direct, wigner_propagator_spectral, ColumnRoute, Complex64,
    DensityMatrix, WignerPlan,
};

fn test_matrix(n: usize) -> DensityMatrix {
    DensityMatrix::from_fn(n, |i, j| {
        let x = (i * 31 + j * 17) as f64;
        Complex64::new(x.sin(), (0.5 * x).cos())
    })
}

fn transform(c: &mut Criterion) {
    let mut group = c.benchmark_group("transform");
    for n in [16usize, 63, 64, 200] {
        let plan = WignerPlan::new(n).unwrap();
        let rho = test_matrix(n);
        let w = plan.convolve(&rho).unwrap();
        group.bench_with_input(BenchmarkId::new("convolve", n), &n, |b, _| {
            b.iter(|| plan.convolve(black_box(&rho)))
        });
        group.bench_with_input(BenchmarkId::new("fourier_cut", n), &n, |b, _| {
            b.iter(|| plan.fourier_cut(black_box(&rho)))
        });
        group.bench_with_input(BenchmarkId::new("inverse", n), &n, |b, _| {
            b.iter(|| plan.inverse(black_box(&w)))
        });
    }
    group.finish();
}

fn propagator(c: &mut Criterion) {
    let mut group = c.benchmark_group("propagator");
    group.sample_size(10);
    for n in [8usize, 16] {
        let u = build_baker(n).unwrap();
        group.bench_with_input(BenchmarkId::new("direct", n), &n, |b, _| {
            b.iter(|| wigner_propagator_direct(&u, 1))
        });
        group.bench_with_input(BenchmarkId::new("spectral", n), &n, |b, _| {
            b.iter(|| wigner_propagator_spectral(&u, 1))
        });
    }
    let u = build_baker(42).unwrap();
    for (name, route) in [
        ("column_direct", ColumnRoute::Direct),
        ("column_spectral", ColumnRoute::Spectral),
    ] {
        group.bench_function(BenchmarkId::new(name, 42), |b| {
            b.iter(|| propagator_columns(&u, (6, 25), &[1, 2], route))
        });
    }
    group.finish();
}

criterion_group!(benches, transform, propagator);
criterion_main!(benches);
