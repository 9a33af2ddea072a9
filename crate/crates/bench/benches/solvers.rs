use backflow_core::{
    build_antisymmetrizer, build_kernel, fermion_bound_with, lambda_ring_with, reduced_matrix, Alpha, SolverConfig,
};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn kernel(c: &mut Criterion) {
    let alpha = Alpha::new(0.39).unwrap();
    let mut group = c.benchmark_group("build_kernel");
    for n in [50, 400] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| build_kernel(black_box(alpha), n))
        });
    }
    group.finish();
}

fn single(c: &mut Criterion) {
    let alpha = Alpha::new(1.16).unwrap();
    let cfg = SolverConfig::default();
    c.bench_function("lambda_ring/400", |b| b.iter(|| lambda_ring_with(black_box(alpha), 400, &cfg)));
}

fn fermion(c: &mut Criterion) {
    let alpha = Alpha::new(0.39).unwrap();
    let mut group = c.benchmark_group("fermion_bound");
    group.sample_size(10);
    for n in [20, 30] {
        let dense = SolverConfig::default();
        let lanczos = SolverConfig {
            dense_limit: 0,
            ..SolverConfig::default()
        };
        group.bench_with_input(BenchmarkId::new("dense", n), &n, |b, &n| {
            b.iter(|| fermion_bound_with(black_box(alpha), n, &dense))
        });
        group.bench_with_input(BenchmarkId::new("lanczos", n), &n, |b, &n| {
            b.iter(|| fermion_bound_with(black_box(alpha), n, &lanczos))
        });
    }
    group.finish();

    let k = build_kernel(alpha, 20);
    let m = build_antisymmetrizer(20).unwrap();
    c.bench_function("reduced_matrix/20", |b| b.iter(|| reduced_matrix(black_box(&m), &k)));
}

criterion_group!(benches, kernel, single, fermion);
criterion_main!(benches);
