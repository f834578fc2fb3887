use arbordet::{
    arborescence_sum, det_reference, det_via_arborescences, partitioned_factor, sequential_factor,
};
use arbordet_bench::{dense_matrix, dense_numeric_graph, dense_symbolic_graph};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn bench_factoring(c: &mut Criterion) {
    let mut group = c.benchmark_group("factoring");
    for n in [3usize, 4, 5] {
        let g = dense_numeric_graph(n, 11);
        group.bench_with_input(BenchmarkId::new("sequential", n), &g, |b, g| {
            b.iter(|| sequential_factor(g).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("partitioned", n), &g, |b, g| {
            b.iter(|| partitioned_factor(g).unwrap())
        });
    }
    group.finish();
}

fn bench_symbolic_factoring(c: &mut Criterion) {
    let mut group = c.benchmark_group("symbolic-factoring");
    for n in [3usize, 4] {
        let g = dense_symbolic_graph(n);
        group.bench_with_input(BenchmarkId::new("sequential", n), &g, |b, g| {
            b.iter(|| sequential_factor(g).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("partitioned", n), &g, |b, g| {
            b.iter(|| partitioned_factor(g).unwrap())
        });
    }
    group.finish();
}

fn bench_enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumeration");
    for n in [3usize, 4, 5, 6] {
        let g = dense_numeric_graph(n, 11);
        group.bench_with_input(BenchmarkId::new("arborescence-sum", n), &g, |b, g| {
            b.iter(|| arborescence_sum(g, 0).unwrap())
        });
    }
    group.finish();
}

fn bench_determinants(c: &mut Criterion) {
    let mut group = c.benchmark_group("determinant");
    for n in [3usize, 4, 5] {
        let a = dense_matrix(n, 23);
        group.bench_with_input(BenchmarkId::new("arborescences", n), &a, |b, a| {
            b.iter(|| det_via_arborescences(a).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("elimination", n), &a, |b, a| {
            b.iter(|| det_reference(a).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_factoring,
    bench_symbolic_factoring,
    bench_enumeration,
    bench_determinants
);
criterion_main!(benches);
