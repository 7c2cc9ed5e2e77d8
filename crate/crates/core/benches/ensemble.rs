use criterion::{criterion_group, criterion_main, Criterion};
use pilotwave::dynamics::{ensemble_run, EnsembleOptions};
use pilotwave::exec::Execution;
use pilotwave::radiation::{photon_pattern_with, PhotonOptions, PhotonSampling};
use pilotwave::wavefield::ExperimentConfig;

fn ensemble(c: &mut Criterion) {
    let cfg = ExperimentConfig::wide_slit();
    let mut group = c.benchmark_group("ensemble_landing_2000");
    group.sample_size(10);
    for (name, mode) in [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)] {
        let opts = EnsembleOptions {
            mode,
            ..EnsembleOptions::default()
        };
        group.bench_function(name, |b| b.iter(|| ensemble_run(&cfg, 2000, 7, &opts).unwrap()));
    }
    group.finish();
}

fn photons(c: &mut Criterion) {
    let cfg = ExperimentConfig::wide_slit();
    let mut group = c.benchmark_group("photon_pattern_20000");
    group.sample_size(10);
    for (name, mode) in [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)] {
        let opts = PhotonOptions {
            sampling: PhotonSampling::Forced,
            mode,
            ..PhotonOptions::default()
        };
        group.bench_function(name, |b| b.iter(|| photon_pattern_with(&cfg, 20_000, 7, &opts).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, ensemble, photons);
criterion_main!(benches);
