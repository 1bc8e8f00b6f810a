//! Grid sweep on the default design space, sequential vs rayon executor.
//! Payload search is off so one iteration stays in the tens of milliseconds.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use mvam::config::Config;
use mvam::energetics::EvalConfig;
use mvam::search::{grid_sweep, Executor};

fn sweep(c: &mut Criterion) {
    let cfg = Config::default();
    let eval = EvalConfig { compute_payload: false, ..cfg.evaluation };
    let mut group = c.benchmark_group("grid_sweep");
    group.sample_size(20);
    for (name, exec) in [("sequential", Executor::sequential()), ("parallel", Executor::parallel(None))] {
        group.bench_with_input(BenchmarkId::new(name, exec.workers()), &exec, |b, exec| {
            b.iter(|| grid_sweep(black_box(&cfg.design_space), &cfg.gait, &cfg.actuators, &eval, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
