//! Batch throughput: the same set of independent runs mapped sequentially and
//! over the rayon pool.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use quasilin::baselines::{mol_simulate, MolConfig, MolScheme};
use quasilin::cli::registry::state_feedback;
use quasilin::par;
use quasilin::stepper::StepOptions;
use quasilin::trajectory::uniform_samples;
use quasilin::{simulate, SolverParams};

fn gammas() -> Vec<f64> {
    (0..16).map(|i| -0.2 + 0.025 * i as f64).collect()
}

fn moc_run(gamma: &f64) -> f64 {
    let params = SolverParams { dw: 0.01, max_step: 0.1, ..Default::default() };
    let tr = simulate(&state_feedback(*gamma), &params, 8.0, &uniform_samples(8.0, 0.01)).unwrap();
    tr.outputs.iter().sum()
}

fn mol_run(gamma: &f64) -> f64 {
    let opts = StepOptions { max_step: 0.1, ..Default::default() };
    let cfg = MolConfig::new(200, MolScheme::Upwind);
    let tr = mol_simulate(&state_feedback(*gamma), &cfg, 4.0, &uniform_samples(4.0, 0.01), &opts).unwrap();
    tr.outputs.iter().sum()
}

fn batch(c: &mut Criterion) {
    let items = gammas();
    let mut group = c.benchmark_group("batch");
    group.sample_size(10);
    for (name, run) in [("moc", moc_run as fn(&f64) -> f64), ("mol_upwind", mol_run)] {
        group.bench_with_input(BenchmarkId::new("sequential", name), &items, |b, items| {
            b.iter(|| par::map_sequential(items, run))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", name), &items, |b, items| {
            b.iter(|| par::map_parallel(items, run))
        });
    }
    group.finish();
}

criterion_group!(benches, batch);
criterion_main!(benches);
