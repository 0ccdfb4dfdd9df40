use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qmix_core::oracle::projected_gradient_default;
use qmix_core::{
    caratheodory_reduce, fixtures, interpolate, minimal_support_profile, random_density,
    random_state_set, solve, solve_with, uniform_grid, SearchOptions,
};

fn fixture_solves(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_fixture");
    for name in fixtures::FIXTURE_NAMES {
        let f = fixtures::fixture(name).unwrap();
        let target = interpolate(&f.variants[0].1, 0.5).unwrap();
        group.bench_with_input(BenchmarkId::new("auto", name), &target, |b, t| {
            b.iter(|| solve(black_box(t), &f.set).unwrap())
        });
    }
    group.finish();
}

fn strategies(c: &mut Criterion) {
    let mut group = c.benchmark_group("strategy_d3_n12");
    let set = random_state_set(3, 12, 5).unwrap();
    let target = random_density(3, 6).unwrap();
    group.bench_function("auto", |b| {
        b.iter(|| solve(black_box(&target), &set).unwrap())
    });
    group.bench_function("exhaustive", |b| {
        b.iter(|| solve_with(black_box(&target), &set, &SearchOptions::exhaustive()).unwrap())
    });
    group.bench_function("oracle", |b| {
        b.iter(|| projected_gradient_default(black_box(&target), &set).unwrap())
    });
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let f = fixtures::fixture("example-iv").unwrap();
    let fam = f.family("r01^1").unwrap();
    let grid = uniform_grid(101);
    let mut group = c.benchmark_group("sweep_example_iv");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| minimal_support_profile(fam, &f.set, &grid, &SearchOptions::default()).unwrap())
    });
    group.bench_function("sequential", |b| {
        let opts = SearchOptions::default().sequential();
        b.iter(|| minimal_support_profile(fam, &f.set, &grid, &opts).unwrap())
    });
    group.finish();
}

fn reduction(c: &mut Criterion) {
    let f = fixtures::fixture("example-iv").unwrap();
    let w = vec![1.0 / f.set.len() as f64; f.set.len()];
    c.bench_function("caratheodory_example_iv", |b| {
        b.iter(|| caratheodory_reduce(black_box(&w), f.set.members()).unwrap())
    });
}

criterion_group!(benches, fixture_solves, strategies, sweep, reduction);
criterion_main!(benches);
