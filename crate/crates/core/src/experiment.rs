//! Replicated simulation experiments.
//!
//! Each replicate draws a training set and an independent test set of the
//! same size, tunes `(lambda, alpha)` on the training set, and scores the
//! chosen model on the test set. Optionally an oracle network that sees only
//! the true support (no selection penalty) is trained on the same split for
//! comparison. Replicates run on a bounded worker pool; all seeds are derived
//! from the master seed by replicate index, so the report does not depend on
//! the number of workers.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, OutcomeKind};
use crate::metrics::{prediction_score, selection_metrics, MetricsRecord, ScoreKind};
use crate::net::{self, init_params, NetworkConfig};
use crate::optimizer::{fit_inner, FitConfig};
use crate::path::{lambda_grid, score, PathConfig, PathMode, Preset};
use crate::penalty::{PenaltyFamily, PenaltySpec};
use crate::seed::{derive, STREAM_ORACLE, STREAM_REPLICATE, STREAM_TEST_DATA, STREAM_TRAIN_DATA};
use crate::simdata::{gen_dataset, Correlation, SimConfig, TRUE_SUPPORT};
use crate::tuner::{tune, TuneConfig};
use crate::{fmt_float, Error, Result};

/// Replicate failure share above which a run counts as failed.
pub const MAX_FAILURE_SHARE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "ld-300")]
    Ld300,
    #[serde(rename = "ld-500")]
    Ld500,
    #[serde(rename = "hd-500")]
    Hd500,
    #[serde(rename = "custom")]
    Custom,
}

impl Scenario {
    fn defaults(self) -> Option<(usize, usize, Preset)> {
        match self {
            Scenario::Ld300 => Some((300, 20, Preset::Ld)),
            Scenario::Ld500 => Some((500, 20, Preset::Ld)),
            Scenario::Hd500 => Some((500, 1000, Preset::Hd)),
            Scenario::Custom => None,
        }
    }
}

fn default_widths() -> Vec<usize> {
    vec![10, 5]
}

fn default_replicates() -> usize {
    20
}

fn default_workers() -> usize {
    1
}

fn default_true() -> bool {
    true
}

fn default_oracle_epochs() -> usize {
    5000
}

/// Experiment description. Preset scenarios fill every unset optional field;
/// `custom` requires them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub model: OutcomeKind,
    #[serde(default)]
    pub censoring_rate: f64,
    #[serde(default)]
    pub correlation: Correlation,
    pub penalty: PenaltyFamily,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default)]
    pub lambda_min: Option<f64>,
    #[serde(default)]
    pub lambda_max: Option<f64>,
    #[serde(default)]
    pub num_lambdas: Option<usize>,
    #[serde(default)]
    pub alpha_min: Option<f64>,
    #[serde(default)]
    pub alpha_max: Option<f64>,
    #[serde(default)]
    pub num_alphas: Option<usize>,
    #[serde(default)]
    pub epochs_first: Option<usize>,
    #[serde(default)]
    pub epochs_rest: Option<usize>,
    #[serde(default = "default_widths")]
    pub hidden_widths: Vec<usize>,
    #[serde(default)]
    pub learning_rate: Option<f64>,
    #[serde(default)]
    pub holdout_fraction: Option<f64>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default = "default_workers")]
    pub parallel_workers: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<String>,
    /// Also train the oracle network on the true support.
    #[serde(default = "default_true")]
    pub oracle: bool,
    #[serde(default = "default_oracle_epochs")]
    pub oracle_epochs: usize,
}

impl ExperimentConfig {
    pub fn preset(scenario: Scenario, model: OutcomeKind, penalty: PenaltyFamily) -> Self {
        Self {
            scenario,
            model,
            censoring_rate: 0.0,
            correlation: Correlation::Independent,
            penalty,
            a: None,
            n: None,
            d: None,
            lambda_min: None,
            lambda_max: None,
            num_lambdas: None,
            alpha_min: None,
            alpha_max: None,
            num_alphas: None,
            epochs_first: None,
            epochs_rest: None,
            hidden_widths: default_widths(),
            learning_rate: None,
            holdout_fraction: None,
            replicates: default_replicates(),
            parallel_workers: default_workers(),
            seed: 0,
            output_dir: None,
            oracle: true,
            oracle_epochs: default_oracle_epochs(),
        }
    }

    /// Fills preset defaults and validates.
    pub fn resolve(&self) -> Result<ResolvedExperiment> {
        let preset = self.scenario.defaults();
        let need = |v: Option<f64>, name: &str, pick: fn(Preset) -> f64| -> Result<f64> {
            v.or(preset.map(|(_, _, p)| pick(p)))
                .ok_or_else(|| Error::InvalidConfig(format!("custom scenario requires '{name}'")))
        };
        let n = self
            .n
            .or(preset.map(|p| p.0))
            .ok_or_else(|| Error::InvalidConfig("custom scenario requires 'n'".into()))?;
        let d = self
            .d
            .or(preset.map(|p| p.1))
            .ok_or_else(|| Error::InvalidConfig("custom scenario requires 'd'".into()))?;
        let lambda_min = need(self.lambda_min, "lambda_min", |p| p.lambda_range().0)?;
        let lambda_max = need(self.lambda_max, "lambda_max", |p| p.lambda_range().1)?;
        let alpha_min = need(self.alpha_min, "alpha_min", |p| p.alpha_range().0)?;
        let alpha_max = need(self.alpha_max, "alpha_max", |p| p.alpha_range().1)?;
        let epochs_first = self
            .epochs_first
            .or(preset.map(|p| p.2.epochs_first()))
            .ok_or_else(|| Error::InvalidConfig("custom scenario requires 'epochs_first'".into()))?;

        let sim = SimConfig {
            n,
            d,
            outcome: self.model,
            censoring_rate: self.censoring_rate,
            correlation: self.correlation,
            seed: 0,
        };
        sim.validate()?;
        let path = PathConfig {
            lambda_min,
            lambda_max,
            num_lambdas: self.num_lambdas.unwrap_or(50),
            epochs_first,
            epochs_rest: self.epochs_rest.unwrap_or(200),
            prune: true,
            family: self.penalty,
            a: self.a,
            mode: PathMode::Backward,
        };
        let num_alphas = self.num_alphas.unwrap_or(10);
        let alpha_grid = if num_alphas == 1 {
            vec![alpha_min]
        } else {
            lambda_grid(alpha_min, alpha_max, num_alphas)?
        };
        let tune = TuneConfig {
            alpha_grid,
            path,
            holdout_fraction: self.holdout_fraction.unwrap_or(0.2),
            stratify: true,
            refit: false,
            seed: 0,
        };
        tune.validate()?;
        let fit = FitConfig {
            learning_rate: self.learning_rate.unwrap_or(0.001),
            ..FitConfig::default()
        };
        fit.validate()?;
        let net = NetworkConfig::new(d, self.hidden_widths.clone());
        net.validate()?;
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("replicates must be positive".into()));
        }
        if self.parallel_workers == 0 {
            return Err(Error::InvalidConfig("parallel_workers must be positive".into()));
        }
        Ok(ResolvedExperiment {
            sim,
            net,
            fit,
            tune,
            replicates: self.replicates,
            workers: self.parallel_workers,
            seed: self.seed,
            oracle: self.oracle,
            oracle_epochs: self.oracle_epochs,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedExperiment {
    pub sim: SimConfig,
    pub net: NetworkConfig,
    pub fit: FitConfig,
    pub tune: TuneConfig,
    pub replicates: usize,
    pub workers: usize,
    pub seed: u64,
    pub oracle: bool,
    pub oracle_epochs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub replicate: usize,
    pub seed: u64,
    pub ok: bool,
    #[serde(default)]
    pub error: Option<String>,
    #[serde(default)]
    pub metrics: Option<MetricsRecord>,
    /// 1-based selected variables.
    #[serde(default)]
    pub selected: Vec<usize>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub validation_loss: Option<f64>,
    #[serde(default)]
    pub oracle_score: Option<f64>,
    pub seconds: f64,
}

/// Statistics over successful replicates. Undefined values (no successes, or
/// an SD from one replicate) are NaN and serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub method: String,
    pub score_kind: Option<ScoreKind>,
    pub replicates_ok: usize,
    pub replicates_failed: usize,
    #[serde(with = "nan_as_null")]
    pub fpr_mean: f64,
    #[serde(with = "nan_as_null")]
    pub fnr_mean: f64,
    #[serde(with = "nan_as_null")]
    pub ms_mean: f64,
    #[serde(with = "nan_as_null")]
    pub ms_median: f64,
    #[serde(with = "nan_as_null")]
    pub ms_sd: f64,
    #[serde(with = "nan_as_null")]
    pub score_mean: f64,
    #[serde(with = "nan_as_null")]
    pub score_median: f64,
    #[serde(with = "nan_as_null")]
    pub score_sd: f64,
    pub oracle_score_median: Option<f64>,
}

mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub replicates: Vec<ReplicateRecord>,
    pub aggregate: Aggregate,
}

impl ExperimentReport {
    /// More than [`MAX_FAILURE_SHARE`] of replicates failed.
    pub fn failed(&self) -> bool {
        self.aggregate.replicates_failed as f64 > MAX_FAILURE_SHARE * self.replicates.len() as f64
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let resolved = config.resolve()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(resolved.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
    let records: Vec<ReplicateRecord> = pool.install(|| {
        (0..resolved.replicates)
            .into_par_iter()
            .map(|r| run_replicate(&resolved, r))
            .collect()
    });
    let aggregate = aggregate(config.penalty, &records);
    Ok(ExperimentReport {
        config: config.clone(),
        replicates: records,
        aggregate,
    })
}

pub fn run_replicate(exp: &ResolvedExperiment, replicate: usize) -> ReplicateRecord {
    let seed = derive(exp.seed, STREAM_REPLICATE, replicate as u64);
    let start = Instant::now();
    let mut record = ReplicateRecord {
        replicate,
        seed,
        ok: false,
        error: None,
        metrics: None,
        selected: Vec::new(),
        lambda: None,
        alpha: None,
        validation_loss: None,
        oracle_score: None,
        seconds: 0.0,
    };
    match replicate_inner(exp, seed, &mut record) {
        Ok(()) => record.ok = true,
        Err(e) => record.error = Some(e.to_string()),
    }
    record.seconds = start.elapsed().as_secs_f64();
    record
}

fn replicate_inner(exp: &ResolvedExperiment, seed: u64, record: &mut ReplicateRecord) -> Result<()> {
    let train_cfg = SimConfig {
        seed: derive(seed, STREAM_TRAIN_DATA, 0),
        ..exp.sim.clone()
    };
    let test_cfg = SimConfig {
        seed: derive(seed, STREAM_TEST_DATA, 0),
        ..exp.sim.clone()
    };
    let (train, truth) = gen_dataset(&train_cfg)?;
    let (test, _) = gen_dataset(&test_cfg)?;

    let tune_cfg = TuneConfig {
        seed,
        ..exp.tune.clone()
    };
    let tuned = tune(&train, &exp.net, &exp.fit, &tune_cfg)?;
    let pred = net::forward_batch(&exp.net, &tuned.best.params, &test.x)?;
    let (score_value, score_kind) = prediction_score(&pred, &test.outcome)?;
    let sel = selection_metrics(&tuned.best.selected, &truth.support, exp.sim.d)?;
    record.metrics = Some(MetricsRecord {
        model_size: sel.model_size,
        fpr_pct: sel.fpr_pct,
        fnr_pct: sel.fnr_pct,
        score: score_value,
        score_kind,
    });
    record.selected = tuned.best.selected.iter().map(|j| j + 1).collect();
    record.lambda = Some(tuned.best.lambda);
    record.alpha = Some(tuned.best.alpha);
    record.validation_loss = Some(tuned.best.validation_loss);

    if exp.oracle {
        let core = train.subset(&tuned.train_idx);
        let valid = train.subset(&tuned.valid_idx);
        record.oracle_score = Some(oracle_score(exp, seed, &core, &valid, &test)?);
    }
    Ok(())
}

/// Test score of an unpenalized network on the true support, with alpha
/// chosen on the validation rows.
pub fn oracle_score(
    exp: &ResolvedExperiment,
    seed: u64,
    train: &Dataset,
    valid: &Dataset,
    test: &Dataset,
) -> Result<f64> {
    let support = TRUE_SUPPORT.to_vec();
    let (train, valid, test) = (
        train.with_columns(&support),
        valid.with_columns(&support),
        test.with_columns(&support),
    );
    let cfg = NetworkConfig::new(support.len(), exp.net.hidden_widths.clone());
    let init_seed = derive(seed, STREAM_ORACLE, 0);
    let no_penalty = PenaltySpec::new(PenaltyFamily::GroupLasso, 0.0);
    let fits: Vec<Option<(f64, crate::net::NetworkParams)>> = exp
        .tune
        .alpha_grid
        .par_iter()
        .map(|&alpha| {
            let fc = FitConfig {
                alpha,
                epochs: exp.oracle_epochs,
                ..exp.fit.clone()
            };
            fit_inner(&train, &cfg, &fc, &no_penalty, init_params(&cfg, init_seed), false)
                .ok()
                .map(|res| (score(&cfg, &res.params, &valid), res.params))
        })
        .collect();
    let best = fits
        .into_iter()
        .flatten()
        .filter(|(loss, _)| loss.is_finite())
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or_else(|| Error::InvalidData("every oracle fit failed".into()))?;
    let pred = net::forward_batch(&cfg, &best.1, &test.x)?;
    Ok(prediction_score(&pred, &test.outcome)?.0)
}

pub fn method_name(family: PenaltyFamily) -> String {
    format!("{}-net", family.name())
}

/// Summary statistics over the successful replicates.
pub fn aggregate(family: PenaltyFamily, records: &[ReplicateRecord]) -> Aggregate {
    let ok: Vec<&MetricsRecord> = records.iter().filter(|r| r.ok).filter_map(|r| r.metrics.as_ref()).collect();
    let col = |f: fn(&MetricsRecord) -> f64| ok.iter().map(|m| f(m)).collect::<Vec<_>>();
    let ms = col(|m| m.model_size as f64);
    let scores = col(|m| m.score);
    let oracle: Vec<f64> = records.iter().filter(|r| r.ok).filter_map(|r| r.oracle_score).collect();
    Aggregate {
        method: method_name(family),
        score_kind: ok.first().map(|m| m.score_kind),
        replicates_ok: ok.len(),
        replicates_failed: records.len() - ok.len(),
        fpr_mean: mean(&col(|m| m.fpr_pct)),
        fnr_mean: mean(&col(|m| m.fnr_pct)),
        ms_mean: mean(&ms),
        ms_median: median(&ms),
        ms_sd: sd(&ms),
        score_mean: mean(&scores),
        score_median: median(&scores),
        score_sd: sd(&scores),
        oracle_score_median: (!oracle.is_empty()).then(|| median(&oracle)),
    }
}

pub fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

/// Sample standard deviation.
pub fn sd(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return f64::NAN;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

fn opt_float(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

/// Per-replicate rows without timing fields.
pub fn write_replicates_csv<W: Write>(records: &[ReplicateRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "replicate",
        "seed",
        "ok",
        "model_size",
        "fpr_pct",
        "fnr_pct",
        "score",
        "oracle_score",
        "lambda",
        "alpha",
        "validation_loss",
        "selected",
        "error",
    ])?;
    for r in records {
        let m = r.metrics.as_ref();
        let selected = r.selected.iter().map(usize::to_string).collect::<Vec<_>>().join(";");
        w.write_record([
            r.replicate.to_string(),
            r.seed.to_string(),
            (r.ok as u8).to_string(),
            m.map(|m| m.model_size.to_string()).unwrap_or_default(),
            opt_float(m.map(|m| m.fpr_pct)),
            opt_float(m.map(|m| m.fnr_pct)),
            opt_float(m.map(|m| m.score)),
            opt_float(r.oracle_score),
            opt_float(r.lambda),
            opt_float(r.alpha),
            opt_float(r.validation_loss),
            selected,
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One summary row per method: FPR, FNR, MS (SD) and prediction scores.
pub fn write_table_csv<W: Write>(agg: &Aggregate, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "method",
        "fpr_pct",
        "fnr_pct",
        "ms_mean",
        "ms_sd",
        "score_kind",
        "score_mean",
        "score_median",
        "oracle_score_median",
        "replicates_ok",
        "replicates_failed",
    ])?;
    let kind = agg
        .score_kind
        .map(|k| serde_json::to_value(k).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default())
        .unwrap_or_default();
    w.write_record([
        agg.method.clone(),
        fmt_float(agg.fpr_mean),
        fmt_float(agg.fnr_mean),
        fmt_float(agg.ms_mean),
        fmt_float(agg.ms_sd),
        kind,
        fmt_float(agg.score_mean),
        fmt_float(agg.score_median),
        opt_float(agg.oracle_score_median),
        agg.replicates_ok.to_string(),
        agg.replicates_failed.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

pub fn write_timings_csv<W: Write>(records: &[ReplicateRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["replicate", "seconds"])?;
    for r in records {
        w.write_record([r.replicate.to_string(), format!("{:.3}", r.seconds)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(i: usize, ms: usize, score: f64, ok: bool) -> ReplicateRecord {
        ReplicateRecord {
            replicate: i,
            seed: i as u64,
            ok,
            error: (!ok).then(|| "boom".into()),
            metrics: ok.then_some(MetricsRecord {
                model_size: ms,
                fpr_pct: ms.saturating_sub(4) as f64 / 16.0 * 100.0,
                fnr_pct: 0.0,
                score,
                score_kind: ScoreKind::R2,
            }),
            selected: (1..=ms).collect(),
            lambda: Some(0.1),
            alpha: Some(0.01),
            validation_loss: Some(1.0),
            oracle_score: ok.then_some(score + 0.01),
            seconds: 1.0,
        }
    }

    #[test]
    fn presets_resolve() {
        let cfg = ExperimentConfig::preset(Scenario::Hd500, OutcomeKind::Survival, PenaltyFamily::GroupScad);
        let r = cfg.resolve().unwrap();
        assert_eq!((r.sim.n, r.sim.d), (500, 1000));
        assert_eq!((r.tune.path.lambda_min, r.tune.path.epochs_first), (1e-2, 200));
        assert_eq!(r.tune.alpha_grid.len(), 10);
        assert_eq!(r.tune.alpha_grid[0], 1e-2);
        assert_eq!(r.net.hidden_widths, vec![10, 5]);
    }

    #[test]
    fn custom_requires_fields() {
        let mut cfg = ExperimentConfig::preset(Scenario::Custom, OutcomeKind::Regression, PenaltyFamily::GroupMcp);
        assert!(cfg.resolve().unwrap_err().to_string().contains("'n'"));
        cfg.n = Some(100);
        cfg.d = Some(10);
        assert!(cfg.resolve().unwrap_err().to_string().contains("lambda_min"));
        cfg.lambda_min = Some(0.01);
        cfg.lambda_max = Some(0.5);
        cfg.alpha_min = Some(0.01);
        cfg.alpha_max = Some(0.1);
        cfg.epochs_first = Some(100);
        assert!(cfg.resolve().is_ok());
    }

    #[test]
    fn config_json_rejects_unknown_fields() {
        let text = r#"{"scenario":"ld-300","model":"regression","penalty":"group-mcp","bogus":1}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(text).is_err());
        let text = r#"{"scenario":"ld-300","model":"regression","penalty":"group-mcp"}"#;
        let cfg: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.replicates, 20);
    }

    #[test]
    fn aggregate_skips_failures() {
        let recs = vec![record(0, 4, 0.8, true), record(1, 6, 0.6, true), record(2, 0, 0.0, false), record(3, 5, 0.7, true)];
        let agg = aggregate(PenaltyFamily::GroupMcp, &recs);
        assert_eq!((agg.replicates_ok, agg.replicates_failed), (3, 1));
        assert_eq!(agg.ms_mean, 5.0);
        assert_eq!(agg.ms_sd, 1.0);
        assert!((agg.score_median - 0.7).abs() < 1e-15);
        assert!((agg.oracle_score_median.unwrap() - 0.71).abs() < 1e-12);
        let report = ExperimentReport {
            config: ExperimentConfig::preset(Scenario::Ld300, OutcomeKind::Regression, PenaltyFamily::GroupMcp),
            replicates: recs,
            aggregate: agg,
        };
        assert!(report.failed());
    }

    #[test]
    fn undefined_statistics_survive_json() {
        let agg = aggregate(PenaltyFamily::GroupScad, &[record(0, 4, 0.5, true)]);
        assert!(agg.ms_sd.is_nan());
        let back: Aggregate = serde_json::from_str(&serde_json::to_string(&agg).unwrap()).unwrap();
        assert!(back.ms_sd.is_nan());
        assert_eq!(back.ms_mean, 4.0);
    }

    #[test]
    fn summary_statistics() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
        assert!((sd(&[1.0, 2.0, 3.0, 4.0]) - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
