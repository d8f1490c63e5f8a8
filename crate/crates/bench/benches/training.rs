use criterion::{criterion_group, criterion_main, Criterion};
use gcnet_bench::dataset;
use gcnet_core::net::init_params;
use gcnet_core::optimizer::fit;
use gcnet_core::path::{solve_path, PathConfig, PathMode};
use gcnet_core::{FitConfig, NetworkConfig, OutcomeKind, PenaltyFamily, PenaltySpec};

fn fit_epochs(c: &mut Criterion) {
    let ds = dataset(300, 20, OutcomeKind::Regression);
    let net = NetworkConfig::new(20, vec![10, 5]);
    let cfg = FitConfig {
        epochs: 100,
        alpha: 0.01,
        ..FitConfig::default()
    };
    let spec = PenaltySpec::new(PenaltyFamily::GroupMcp, 0.1);
    c.bench_function("fit_100_epochs_ld300", |b| {
        b.iter(|| fit(&ds, &net, &cfg, &spec, init_params(&net, 3)).unwrap())
    });
}

fn short_path(c: &mut Criterion) {
    let ds = dataset(300, 20, OutcomeKind::Classification);
    let net = NetworkConfig::new(20, vec![10, 5]);
    let path = PathConfig {
        lambda_min: 1e-3,
        lambda_max: 0.5,
        num_lambdas: 5,
        epochs_first: 100,
        epochs_rest: 20,
        prune: true,
        family: PenaltyFamily::GroupMcp,
        a: None,
        mode: PathMode::Backward,
    };
    let cfg = FitConfig {
        alpha: 0.01,
        ..FitConfig::default()
    };
    let mut group = c.benchmark_group("path");
    group.sample_size(10);
    group.bench_function("backward_5_lambdas", |b| b.iter(|| solve_path(&ds, &net, &cfg, &path, 5).unwrap()));
    group.finish();
}

criterion_group!(benches, fit_epochs, short_path);
criterion_main!(benches);
