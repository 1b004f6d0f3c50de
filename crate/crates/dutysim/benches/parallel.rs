//! Parallel-vs-serial benchmarks for the two data-parallel hot paths:
//! the oracle's probability-grid scan and simulation sweep batches.
//!
//! Run with `cargo bench`. Building with `--no-default-features` makes the
//! "parallel" variants fall back to the serial path, which is a handy
//! sanity check that the comparison itself is honest.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dutysim::cli::{simulate_batch, simulate_batch_serial};
use dutysim::model::{ChannelModel, Policy, SimConfig};
use dutysim::oracle::{minimize_energy, minimize_energy_serial};

fn one_node_good() -> SimConfig {
    let mut cfg = SimConfig::network(1, Policy::Ess, 1000.0);
    cfg.channel = ChannelModel::fixed(20);
    cfg
}

fn bench_grid_scan(c: &mut Criterion) {
    let cfg = one_node_good();
    let mut group = c.benchmark_group("oracle_grid_scan");
    for step in [0.05, 0.02] {
        group.bench_with_input(BenchmarkId::new("serial", step), &step, |b, &s| {
            b.iter(|| minimize_energy_serial(&cfg, s).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("parallel", step), &step, |b, &s| {
            b.iter(|| minimize_energy(&cfg, s).unwrap())
        });
    }
    group.finish();
}

fn bench_sweep_batch(c: &mut Criterion) {
    let mut batch = Vec::new();
    for v in [500.0, 5000.0, 50000.0] {
        for seed in 0..4 {
            let mut cfg = SimConfig::network(5, Policy::Ess, v);
            cfg.horizon_slots = Some(20_000);
            cfg.infinite_battery = true;
            cfg.seed = seed;
            batch.push(cfg);
        }
    }
    let mut group = c.benchmark_group("sweep_batch");
    group.sample_size(10);
    group.bench_function("serial", |b| {
        b.iter(|| simulate_batch_serial(&batch).unwrap())
    });
    group.bench_function("parallel", |b| b.iter(|| simulate_batch(&batch).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_grid_scan, bench_sweep_batch);
criterion_main!(benches);
