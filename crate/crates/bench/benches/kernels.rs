use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use gz_core::characters::build_group;
use gz_core::circle::{build_exact_grid, j_chi};
use gz_core::goldbach::{build_class_convolution, goldbach_table};
use gz_core::lfunc::{find_zeros, hurwitz_zeta};
use gz_core::numtheory::build_sieve;
use gz_core::Complex64;

fn sieve(c: &mut Criterion) {
    let mut g = c.benchmark_group("sieve");
    for x in [100_000u64, 1_000_000] {
        g.bench_with_input(BenchmarkId::from_parameter(x), &x, |b, &x| {
            b.iter(|| build_sieve(black_box(x)).unwrap())
        });
    }
    g.finish();
}

fn convolution(c: &mut Criterion) {
    let s = build_sieve(1_000_000).unwrap();
    let mut g = c.benchmark_group("convolution");
    g.sample_size(10);
    g.bench_function("table 1e6", |b| b.iter(|| goldbach_table(black_box(1_000_000), &s).unwrap()));
    g.bench_function("class q=5 1e6", |b| {
        b.iter(|| build_class_convolution(5, 1, 2, black_box(1_000_000), &s).unwrap())
    });
    g.finish();
}

fn hurwitz(c: &mut Criterion) {
    let mut g = c.benchmark_group("hurwitz");
    for t in [10.0, 100.0, 1000.0] {
        g.bench_with_input(BenchmarkId::from_parameter(t), &t, |b, &t| {
            b.iter(|| hurwitz_zeta(black_box(Complex64::new(0.5, t)), 0.3).unwrap())
        });
    }
    g.finish();
}

fn zeros(c: &mut Criterion) {
    let mut g = c.benchmark_group("zeros");
    g.sample_size(10);
    for q in [1u64, 5, 7] {
        let group = build_group(q).unwrap();
        let chi = group.characters().last().unwrap().induce_primitive();
        g.bench_with_input(BenchmarkId::new("height 100", q), &chi, |b, chi| {
            b.iter(|| find_zeros(chi, 100.0).unwrap())
        });
    }
    g.finish();
}

fn circle(c: &mut Criterion) {
    let s = build_sieve(100_000).unwrap();
    let group = build_group(4).unwrap();
    let mut g = c.benchmark_group("circle");
    g.sample_size(10);
    g.bench_function("exact grid q=4 x=1e4", |b| {
        b.iter(|| build_exact_grid(black_box(10_000), 4, &s).unwrap())
    });
    let grid = build_exact_grid(10_000, 4, &s).unwrap();
    g.bench_function("j_chi q=4 x=1e4", |b| {
        b.iter(|| j_chi(&group.characters()[1], &grid).unwrap())
    });
    g.finish();
}

criterion_group!(benches, sieve, convolution, hurwitz, zeros, circle);
criterion_main!(benches);
