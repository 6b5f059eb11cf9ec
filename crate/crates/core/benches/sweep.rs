use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use geophase::experiment::{run_sweep, Execution, ExperimentConfig};

fn config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.qubit.mu_x = 0.3;
    cfg.qubit.mu_z = 0.1;
    cfg.bath.temperature = 0.5;
    cfg.integrator.steps_per_period = 500;
    cfg.sweep.count = 64;
    cfg
}

fn sweep(c: &mut Criterion) {
    let cfg = config();
    let mut group = c.benchmark_group("sweep_64_points");
    group.sample_size(20);
    group.bench_function("serial", |b| {
        b.iter(|| run_sweep(black_box(&cfg), Execution::Serial).unwrap())
    });
    group.bench_function("parallel", |b| {
        b.iter(|| run_sweep(black_box(&cfg), Execution::Parallel).unwrap())
    });
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
