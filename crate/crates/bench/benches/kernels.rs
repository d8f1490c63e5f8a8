use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gcnet_bench::dataset;
use gcnet_core::loss::cox_loss;
use gcnet_core::net::{backprop, forward_batch, init_params};
use gcnet_core::{NetworkConfig, Outcome, OutcomeKind, PenaltyFamily, PenaltySpec};

fn prox(c: &mut Criterion) {
    let z: Vec<f64> = (0..10).map(|i| (i as f64 - 4.5) * 0.07).collect();
    let mut group = c.benchmark_group("prox");
    for family in [PenaltyFamily::GroupLasso, PenaltyFamily::GroupMcp, PenaltyFamily::GroupScad] {
        let spec = PenaltySpec::new(family, 0.1);
        group.bench_function(family.name(), |b| b.iter(|| spec.prox(black_box(&z))));
    }
    group.finish();
}

fn network(c: &mut Criterion) {
    let mut group = c.benchmark_group("network");
    for d in [20, 1000] {
        let ds = dataset(500, d, OutcomeKind::Regression);
        let net = NetworkConfig::new(d, vec![10, 5]);
        let params = init_params(&net, 1);
        let upstream = vec![1.0 / 500.0; 500];
        group.bench_with_input(BenchmarkId::new("forward", d), &d, |b, _| {
            b.iter(|| forward_batch(&net, &params, black_box(&ds.x)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("backprop", d), &d, |b, _| {
            b.iter(|| backprop(&net, &params, black_box(&ds.x), &upstream).unwrap())
        });
    }
    group.finish();
}

fn cox(c: &mut Criterion) {
    let mut group = c.benchmark_group("cox_loss");
    for n in [300, 3000] {
        let ds = dataset(n, 5, OutcomeKind::Survival);
        let Outcome::Survival { time, event } = &ds.outcome else {
            unreachable!()
        };
        let score: Vec<f64> = (0..n).map(|i| (i % 17) as f64 * 0.1 - 0.8).collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| cox_loss(black_box(&score), time, event).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, prox, network, cox);
criterion_main!(benches);
