//! Holdout selection of `(lambda, alpha)`.
//!
//! A fraction of the training rows is held out. For every alpha a full path
//! is fitted on the remaining rows and each lambda is scored by the native
//! loss on the held-out rows. Alpha paths run in parallel and are merged in
//! grid order.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, OutcomeKind};
use crate::net::{NetworkConfig, NetworkParams};
use crate::optimizer::FitConfig;
use crate::path::{lambda_grid, solve_path_scored, PathConfig, PathResult, Preset};
use crate::seed::{derive, STREAM_INIT, STREAM_SPLIT};
use crate::{fmt_float, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TuneConfig {
    pub alpha_grid: Vec<f64>,
    pub path: PathConfig,
    pub holdout_fraction: f64,
    /// Preserve class proportions in the split (classification only).
    pub stratify: bool,
    /// Refit the winning cell on all training rows.
    pub refit: bool,
    pub seed: u64,
}

impl Default for TuneConfig {
    fn default() -> Self {
        let (lo, hi) = Preset::Ld.alpha_range();
        Self {
            alpha_grid: lambda_grid(lo, hi, 10).expect("static grid"),
            path: PathConfig::default(),
            holdout_fraction: 0.2,
            stratify: true,
            refit: false,
            seed: 0,
        }
    }
}

impl TuneConfig {
    pub fn validate(&self) -> Result<()> {
        if self.alpha_grid.is_empty() {
            return Err(Error::InvalidConfig("alpha grid is empty".into()));
        }
        if self.alpha_grid.iter().any(|a| !(*a >= 0.0 && a.is_finite())) {
            return Err(Error::InvalidConfig("alpha values must be finite and non-negative".into()));
        }
        if !(self.holdout_fraction > 0.0 && self.holdout_fraction < 1.0) {
            return Err(Error::InvalidConfig("holdout_fraction must lie in (0, 1)".into()));
        }
        self.path.validate()
    }
}

/// One `(alpha, lambda)` cell of the tuning grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TuneRow {
    pub alpha: f64,
    pub lambda: f64,
    /// +inf when the fit diverged or the loss is undefined on the held-out rows.
    pub validation_loss: f64,
    pub model_size: usize,
    /// Fingerprint of the fitted parameters at this cell.
    pub param_checksum: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneBest {
    pub lambda: f64,
    pub alpha: f64,
    /// Full-width parameters.
    pub params: NetworkParams,
    pub selected: Vec<usize>,
    pub validation_loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult {
    pub best: TuneBest,
    pub table: Vec<TuneRow>,
    pub train_idx: Vec<usize>,
    pub valid_idx: Vec<usize>,
}

/// Deterministic partition of `0..n` into training and validation rows.
///
/// The validation part has `round(fraction * n)` rows, or with labels,
/// `round(fraction * n_c)` rows from each class `c`.
pub fn holdout_split(
    n: usize,
    fraction: f64,
    stratify_labels: Option<&[f64]>,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < 5 {
        return Err(Error::InvalidData(format!("need at least 5 rows to split, got {n}")));
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidConfig("holdout fraction must lie in (0, 1)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut valid = Vec::new();
    match stratify_labels {
        Some(labels) => {
            if labels.len() != n {
                return Err(Error::Dimension("label count differs from n".into()));
            }
            let mut classes: Vec<f64> = labels.to_vec();
            classes.sort_by(f64::total_cmp);
            classes.dedup();
            for c in classes {
                let mut members: Vec<usize> = (0..n).filter(|&i| labels[i] == c).collect();
                members.shuffle(&mut rng);
                let k = (fraction * members.len() as f64).round() as usize;
                valid.extend_from_slice(&members[..k]);
            }
        }
        None => {
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(&mut rng);
            let k = (fraction * n as f64).round() as usize;
            valid.extend_from_slice(&all[..k]);
        }
    }
    valid.sort_unstable();
    let mut is_valid = vec![false; n];
    for &i in &valid {
        is_valid[i] = true;
    }
    let train: Vec<usize> = (0..n).filter(|&i| !is_valid[i]).collect();
    if train.is_empty() || valid.is_empty() {
        return Err(Error::InvalidData(format!(
            "split of {n} rows at fraction {fraction} leaves an empty part"
        )));
    }
    Ok((train, valid))
}

/// Best cell of one alpha path plus its table rows.
struct AlphaOutcome {
    rows: Vec<TuneRow>,
    best: Option<TuneBest>,
}

pub fn tune(
    dataset: &Dataset,
    net_config: &NetworkConfig,
    fit_template: &FitConfig,
    tune_config: &TuneConfig,
) -> Result<TuneResult> {
    tune_config.validate()?;
    let labels = match (tune_config.stratify, dataset.kind()) {
        (true, OutcomeKind::Classification) => dataset.outcome.labels(),
        _ => None,
    };
    let (train_idx, valid_idx) = holdout_split(
        dataset.n(),
        tune_config.holdout_fraction,
        labels,
        derive(tune_config.seed, STREAM_SPLIT, 0),
    )?;
    let train = dataset.subset(&train_idx);
    let valid = dataset.subset(&valid_idx);
    let init_seed = derive(tune_config.seed, STREAM_INIT, 0);
    let grid = tune_config.path.grid()?;

    let outcomes: Vec<AlphaOutcome> = tune_config
        .alpha_grid
        .par_iter()
        .map(|&alpha| {
            let fc = FitConfig {
                alpha,
                ..fit_template.clone()
            };
            let path = match solve_path_scored(&train, net_config, &fc, &tune_config.path, init_seed, Some(&valid)) {
                Ok(p) => p,
                Err(Error::PathFailed { partial, .. }) => *partial,
                Err(e) => return Err(e),
            };
            Ok(summarize(alpha, &grid, path))
        })
        .collect::<Result<_>>()?;

    let mut table = Vec::with_capacity(grid.len() * outcomes.len());
    let mut best: Option<TuneBest> = None;
    for o in outcomes {
        table.extend(o.rows);
        if let Some(b) = o.best {
            if best.as_ref().is_none_or(|cur| better(&b, cur)) {
                best = Some(b);
            }
        }
    }
    let mut best = best.ok_or_else(|| Error::InvalidData("every tuning cell failed".into()))?;

    if tune_config.refit {
        let refit_path = PathConfig {
            lambda_max: best.lambda,
            ..tune_config.path.clone()
        };
        let fc = FitConfig {
            alpha: best.alpha,
            ..fit_template.clone()
        };
        if let Some(last) = refit_entries(dataset, net_config, &fc, &refit_path, &grid, init_seed)? {
            best.selected = last.params.selected();
            best.params = last.params;
        }
    }

    Ok(TuneResult {
        best,
        table,
        train_idx,
        valid_idx,
    })
}

/// Backward path on all rows up to the chosen lambda.
fn refit_entries(
    dataset: &Dataset,
    net_config: &NetworkConfig,
    fc: &FitConfig,
    path: &PathConfig,
    grid: &[f64],
    seed: u64,
) -> Result<Option<crate::path::PathEntry>> {
    let upto: Vec<f64> = grid.iter().copied().filter(|&l| l <= path.lambda_max).collect();
    if upto.len() < 2 {
        // A single-point path: one fresh fit at lambda_min.
        let spec = path.spec(upto.first().copied().unwrap_or(path.lambda_min));
        let res = crate::optimizer::fit(
            dataset,
            net_config,
            &FitConfig {
                epochs: path.epochs_first,
                ..fc.clone()
            },
            &spec,
            crate::net::init_params(net_config, seed),
        )?;
        return Ok(Some(crate::path::PathEntry {
            lambda: spec.lambda,
            selected: res.selected.clone(),
            params: res.params,
            validation_loss: None,
            epochs_run: res.epochs_run,
            work: 0,
        }));
    }
    let cfg = PathConfig {
        lambda_min: upto[0],
        lambda_max: *upto.last().expect("nonempty"),
        num_lambdas: upto.len(),
        ..path.clone()
    };
    let result = crate::path::solve_path(dataset, net_config, fc, &cfg, seed)?;
    Ok(result.entries.into_iter().last())
}

fn summarize(alpha: f64, grid: &[f64], path: PathResult) -> AlphaOutcome {
    let mut rows = Vec::with_capacity(grid.len());
    let mut best: Option<TuneBest> = None;
    let mut entries = path.entries.into_iter().peekable();
    for &lambda in grid {
        match entries.next_if(|e| e.lambda == lambda) {
            Some(e) => {
                let loss = e.validation_loss.unwrap_or(f64::INFINITY);
                rows.push(TuneRow {
                    alpha,
                    lambda,
                    validation_loss: loss,
                    model_size: e.selected.len(),
                    param_checksum: checksum(&e.params),
                });
                let cand = TuneBest {
                    lambda,
                    alpha,
                    selected: e.selected,
                    params: e.params,
                    validation_loss: loss,
                };
                if loss.is_finite() && best.as_ref().is_none_or(|cur| better(&cand, cur)) {
                    best = Some(cand);
                }
            }
            None => rows.push(TuneRow {
                alpha,
                lambda,
                validation_loss: f64::INFINITY,
                model_size: 0,
                param_checksum: 0,
            }),
        }
    }
    AlphaOutcome { rows, best }
}

/// Lower loss wins; ties go to the smaller model, then the larger lambda.
fn better(a: &TuneBest, b: &TuneBest) -> bool {
    a.validation_loss
        .total_cmp(&b.validation_loss)
        .then(a.selected.len().cmp(&b.selected.len()))
        .then(b.lambda.total_cmp(&a.lambda))
        .is_lt()
}

/// FNV-1a over the parameter bit patterns.
pub fn checksum(params: &NetworkParams) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in params.iter() {
        for b in v.to_bits().to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

/// Writes `alpha,lambda,validation_loss,model_size`.
pub fn write_tune_csv<W: Write>(table: &[TuneRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["alpha", "lambda", "validation_loss", "model_size"])?;
    for r in table {
        w.write_record([
            fmt_float(r.alpha),
            fmt_float(r.lambda),
            fmt_float(r.validation_loss),
            r.model_size.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
