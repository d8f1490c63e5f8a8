use gcnet_core::metrics::{c_index, selection_metrics};
use gcnet_core::simdata::{
    baseline_cumulative_hazard, draw_survival, gen_dataset, Correlation, SimConfig, TRUE_SUPPORT,
};
use gcnet_core::{Outcome, OutcomeKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::Value;

fn sim(n: usize, d: usize, outcome: OutcomeKind, seed: u64) -> SimConfig {
    SimConfig::new(n, d, outcome, seed)
}

/// Largest gap between the empirical CDF of `sample` and `cdf`.
fn ks_statistic(sample: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn transformed_times_are_unit_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for c in [-1.5, 0.0, 2.0] {
        let f = vec![c; 100_000];
        let draw = draw_survival(&f, 0.0, &mut rng);
        let mut z: Vec<f64> = draw.latent.iter().map(|&t| baseline_cumulative_hazard(t) * f64::exp(c)).collect();
        let ks = ks_statistic(&mut z, |x| 1.0 - (-x).exp());
        assert!(ks < 0.01, "c={c}: KS {ks}");
    }
}

#[test]
fn censored_count_is_exact() {
    for (n, rate) in [(1000, 0.3), (333, 0.5), (10, 0.25), (7, 0.0)] {
        let cfg = SimConfig {
            censoring_rate: rate,
            ..sim(n, 6, OutcomeKind::Survival, n as u64)
        };
        let (ds, truth) = gen_dataset(&cfg).unwrap();
        let Outcome::Survival { time, event } = &ds.outcome else { panic!() };
        let censored = event.iter().filter(|e| !**e).count();
        assert_eq!(censored, (rate * n as f64).round() as usize);
        let latent = truth.latent_time.unwrap();
        for i in 0..n {
            if event[i] {
                assert_eq!(time[i], latent[i]);
            } else {
                assert!(time[i] < latent[i] && time[i] > 0.0);
            }
        }
    }
}

#[test]
fn true_risk_is_discriminative() {
    let fixture: Value = serde_json::from_str(include_str!("fixtures/c_index_true_f.json")).unwrap();
    let mean = fixture["mean"].as_f64().unwrap();
    let sd = fixture["sd"].as_f64().unwrap();
    for seed in [1, 2, 3] {
        let (ds, truth) = gen_dataset(&sim(2000, 5, OutcomeKind::Survival, seed)).unwrap();
        let Outcome::Survival { time, event } = &ds.outcome else { panic!() };
        let c = c_index(&truth.f_values, time, event).unwrap();
        assert!(c > 0.80, "seed {seed}: {c}");
        assert!((c - mean).abs() < 5.0 * sd, "seed {seed}: {c} far from fixture {mean}");
    }
}

#[test]
fn regression_noise_is_standard_normal() {
    let (ds, truth) = gen_dataset(&sim(50_000, 5, OutcomeKind::Regression, 4)).unwrap();
    let Outcome::Continuous(y) = &ds.outcome else { panic!() };
    let resid: Vec<f64> = y.iter().zip(&truth.f_values).map(|(a, b)| a - b).collect();
    let n = resid.len() as f64;
    let m = resid.iter().sum::<f64>() / n;
    let v = resid.iter().map(|r| (r - m).powi(2)).sum::<f64>() / (n - 1.0);
    assert!(m.abs() < 0.02, "{m}");
    assert!((v - 1.0).abs() < 0.03, "{v}");
}

#[test]
fn classification_rate_follows_sigmoid() {
    let (ds, truth) = gen_dataset(&sim(50_000, 5, OutcomeKind::Classification, 8)).unwrap();
    let Outcome::Binary(y) = &ds.outcome else { panic!() };
    let n = y.len() as f64;
    let observed = y.iter().sum::<f64>() / n;
    let expected = truth.f_values.iter().map(|f| 1.0 / (1.0 + (-f).exp())).sum::<f64>() / n;
    assert!((observed - expected).abs() < 0.01, "{observed} vs {expected}");
}

#[test]
fn ar_covariates_have_geometric_correlation() {
    let cfg = SimConfig {
        correlation: Correlation::Ar(0.6),
        ..sim(40_000, 6, OutcomeKind::Regression, 12)
    };
    let (ds, _) = gen_dataset(&cfg).unwrap();
    let n = ds.n() as f64;
    for lag in 1..4 {
        let c: f64 = (0..ds.n()).map(|i| ds.x.get(i, 0) * ds.x.get(i, lag)).sum::<f64>() / n;
        assert!((c - 0.6f64.powi(lag as i32)).abs() < 0.03, "lag {lag}: {c}");
    }
}

/// Pairwise definition: event row `i` with `time_i < time_j` is comparable to `j`.
fn c_index_pairs(score: &[f64], time: &[f64], event: &[bool]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..score.len() {
        for j in 0..score.len() {
            if event[i] && time[i] < time[j] {
                den += 1.0;
                if score[i] > score[j] {
                    num += 1.0;
                } else if score[i] == score[j] {
                    num += 0.5;
                }
            }
        }
    }
    num / den
}

#[test]
fn c_index_matches_pairwise_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in [2usize, 5, 40, 300] {
        let score: Vec<f64> = (0..n).map(|_| (rng.sample::<f64, _>(StandardNormal) * 2.0).round()).collect();
        let time: Vec<f64> = (0..n).map(|_| (rng.random::<f64>() * 10.0).ceil()).collect();
        let mut event: Vec<bool> = (0..n).map(|_| rng.random::<f64>() < 0.6).collect();
        let first = (0..n).min_by(|&a, &b| time[a].total_cmp(&time[b])).unwrap();
        event[first] = true;
        if time.iter().all(|&t| t == time[first]) {
            continue;
        }
        let fast = c_index(&score, &time, &event).unwrap();
        let slow = c_index_pairs(&score, &time, &event);
        assert!((fast - slow).abs() < 1e-12, "n={n}: {fast} vs {slow}");
    }
}

#[test]
fn selection_metrics_on_truth() {
    let m = selection_metrics(&TRUE_SUPPORT, &TRUE_SUPPORT, 20).unwrap();
    assert_eq!((m.model_size, m.fpr_pct, m.fnr_pct), (4, 0.0, 0.0));
    let m = selection_metrics(&[0, 1, 4, 5], &TRUE_SUPPORT, 20).unwrap();
    assert_eq!((m.fpr_pct, m.fnr_pct), (12.5, 50.0));
}
