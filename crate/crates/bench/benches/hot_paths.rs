//! Hot paths: steady-state solves, the master-equation right-hand side,
//! short integrations, trajectory batches, and the gain map.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use micromaser::jcm::gain_superoperator_full;
use micromaser::master::{diagonal_rhs, integrate_diagonal};
use micromaser::steady::steady_state;
use micromaser::thermal_distribution;
use micromaser::trajectory::simulate;
use micromaser_bench::{damped_pure_state, operating_point};

fn bench_steady_state(c: &mut Criterion) {
    let mut group = c.benchmark_group("steady_state");
    for n_max in [128usize, 256, 512, 1024] {
        let cfg = operating_point(50.0, 0.15, 1.0, n_max);
        group.bench_with_input(BenchmarkId::from_parameter(n_max), &cfg, |b, cfg| {
            b.iter(|| steady_state(black_box(cfg)).unwrap());
        });
    }
    group.finish();
}

fn bench_diagonal_rhs(c: &mut Criterion) {
    let cfg = operating_point(50.0, 0.15, 1.0, 256);
    let state = thermal_distribution(0.15, 256).unwrap();
    c.bench_function("diagonal_rhs 256", |b| {
        b.iter(|| diagonal_rhs(black_box(&state), black_box(&cfg)).unwrap());
    });
}

fn bench_integrate_diagonal(c: &mut Criterion) {
    let cfg = operating_point(20.0, 0.15, 1.0, 128);
    let start = thermal_distribution(0.15, 128).unwrap();
    let duration = 1.0 / cfg.decay_rate();
    c.bench_function("integrate_diagonal one lifetime", |b| {
        b.iter(|| integrate_diagonal(black_box(&start), black_box(&cfg), duration, 1e-9).unwrap());
    });
}

fn bench_simulate(c: &mut Criterion) {
    let cfg = operating_point(20.0, 0.15, 1.0, 128);
    c.bench_function("simulate 1000 atoms", |b| {
        b.iter(|| simulate(black_box(&cfg), 5e-5, 1000, 7).unwrap());
    });
}

fn bench_gain_map(c: &mut Criterion) {
    let rho = damped_pure_state(64);
    c.bench_function("gain_superoperator 64", |b| {
        b.iter(|| gain_superoperator_full(black_box(&rho), 1.0).unwrap());
    });
}

criterion_group!(
    benches,
    bench_steady_state,
    bench_diagonal_rhs,
    bench_integrate_diagonal,
    bench_simulate,
    bench_gain_map
);
criterion_main!(benches);
