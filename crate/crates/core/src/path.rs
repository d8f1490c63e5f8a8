//! Regularization paths over a log-spaced lambda grid.
//!
//! The default backward mode fits the densest model first (smallest lambda,
//! fresh initialization, long budget) and walks up the grid, warm-starting
//! each fit from the previous solution. With pruning on, inputs whose group is
//! zero after a fit are dropped from the network for the rest of the path, so
//! they can never re-enter and later fits get cheaper.
//!
//! Forward and non-pathwise modes exist to compare path shapes.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::loss;
use crate::matrix::Matrix;
use crate::net::{self, embed_inputs, init_params, prune_inputs, NetworkConfig, NetworkParams};
use crate::optimizer::{fit, FitConfig};
use crate::penalty::{PenaltyFamily, PenaltySpec};
use crate::seed;
use crate::{fmt_float, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathMode {
    /// Dense to sparse with warm starts.
    #[default]
    Backward,
    /// Sparse to dense with warm starts; fresh initialization until the first
    /// non-empty model appears.
    Forward,
    /// Independent fresh fit at every lambda.
    NonPathwise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PathConfig {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub num_lambdas: usize,
    /// Epochs for the first fitted point (lambda_min in backward mode).
    pub epochs_first: usize,
    pub epochs_rest: usize,
    pub prune: bool,
    pub family: PenaltyFamily,
    /// Concavity parameter; `None` uses the family default.
    pub a: Option<f64>,
    pub mode: PathMode,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self::preset(Preset::Ld, PenaltyFamily::GroupMcp)
    }
}

/// Named grid presets for low- and high-dimensional problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Ld,
    Hd,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ld" => Ok(Preset::Ld),
            "hd" => Ok(Preset::Hd),
            other => Err(Error::InvalidConfig(format!("unknown preset '{other}' (expected ld or hd)"))),
        }
    }
}

impl Preset {
    pub fn lambda_range(self) -> (f64, f64) {
        match self {
            Preset::Ld => (1e-3, 0.5),
            Preset::Hd => (1e-2, 0.5),
        }
    }

    pub fn alpha_range(self) -> (f64, f64) {
        match self {
            Preset::Ld => (1e-3, 0.1),
            Preset::Hd => (1e-2, 0.1),
        }
    }

    pub fn epochs_first(self) -> usize {
        match self {
            Preset::Ld => 2000,
            Preset::Hd => 200,
        }
    }
}

impl PathConfig {
    pub fn preset(preset: Preset, family: PenaltyFamily) -> Self {
        let (lambda_min, lambda_max) = preset.lambda_range();
        Self {
            lambda_min,
            lambda_max,
            num_lambdas: 50,
            epochs_first: preset.epochs_first(),
            epochs_rest: 200,
            prune: true,
            family,
            a: None,
            mode: PathMode::Backward,
        }
    }

    pub fn spec(&self, lambda: f64) -> PenaltySpec {
        let spec = PenaltySpec::new(self.family, lambda);
        match self.a {
            Some(a) => spec.with_a(a),
            None => spec,
        }
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        lambda_grid(self.lambda_min, self.lambda_max, self.num_lambdas)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        if self.epochs_first == 0 || self.epochs_rest == 0 {
            return Err(Error::InvalidConfig("epoch budgets must be positive".into()));
        }
        self.spec(self.lambda_max).validate()
    }
}

/// One fitted point of a path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathEntry {
    pub lambda: f64,
    /// Parameters in the original input indexing; pruned groups are zero.
    pub params: NetworkParams,
    /// Original (0-based) indices of selected inputs.
    pub selected: Vec<usize>,
    pub validation_loss: Option<f64>,
    pub epochs_run: usize,
    /// Gradient multiply-adds spent on this fit.
    pub work: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PathWarning {
    /// The largest lambda did not produce the empty model.
    NotNullAtLambdaMax { lambda: f64, model_size: usize },
}

impl std::fmt::Display for PathWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PathWarning::NotNullAtLambdaMax { lambda, model_size } => write!(
                f,
                "model at lambda_max = {lambda} still selects {model_size} variables; consider a larger lambda_max"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    /// Full-width network configuration.
    pub config: NetworkConfig,
    /// Entries in increasing lambda order.
    pub entries: Vec<PathEntry>,
    pub warnings: Vec<PathWarning>,
}

impl PathResult {
    pub fn total_work(&self) -> u64 {
        self.entries.iter().map(|e| e.work).sum()
    }
}

/// `m` log-evenly spaced values from `lambda_min` to `lambda_max`, inclusive.
/// A single point needs `lambda_min == lambda_max`.
pub fn lambda_grid(lambda_min: f64, lambda_max: f64, m: usize) -> Result<Vec<f64>> {
    if m == 1 && lambda_min == lambda_max && lambda_min > 0.0 && lambda_min.is_finite() {
        return Ok(vec![lambda_min]);
    }
    if !(lambda_min > 0.0 && lambda_min < lambda_max && lambda_max.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "lambda range must satisfy 0 < min < max, got [{lambda_min}, {lambda_max}]"
        )));
    }
    if m < 2 {
        return Err(Error::InvalidConfig("a lambda grid needs at least 2 values".into()));
    }
    let (lo, hi) = (lambda_min.ln(), lambda_max.ln());
    let step = (hi - lo) / (m - 1) as f64;
    let mut grid: Vec<f64> = (0..m).map(|k| (lo + step * k as f64).exp()).collect();
    grid[0] = lambda_min;
    grid[m - 1] = lambda_max;
    Ok(grid)
}

/// Fits the whole path on `dataset`.
pub fn solve_path(
    dataset: &Dataset,
    net_config: &NetworkConfig,
    fit_config: &FitConfig,
    path_config: &PathConfig,
    seed: u64,
) -> Result<PathResult> {
    solve_path_scored(dataset, net_config, fit_config, path_config, seed, None)
}

/// As [`solve_path`], additionally scoring every entry by the native loss on
/// `validation`. An entry whose validation loss is undefined scores +inf.
pub fn solve_path_scored(
    dataset: &Dataset,
    net_config: &NetworkConfig,
    fit_config: &FitConfig,
    path_config: &PathConfig,
    seed: u64,
    validation: Option<&Dataset>,
) -> Result<PathResult> {
    path_config.validate()?;
    fit_config.validate()?;
    net_config.validate()?;
    if dataset.n() == 0 {
        return Err(Error::InvalidData("empty dataset".into()));
    }
    if net_config.input_dim != dataset.d() {
        return Err(Error::Dimension(format!(
            "network expects {} inputs, dataset has {}",
            net_config.input_dim,
            dataset.d()
        )));
    }
    if let Some(v) = validation {
        if v.d() != dataset.d() {
            return Err(Error::Dimension("validation width differs from training width".into()));
        }
    }
    let grid = path_config.grid()?;
    let mut solver = Solver {
        full: dataset,
        validation,
        full_config: net_config.clone(),
        fit_config,
        path_config,
        entries: Vec::with_capacity(grid.len()),
    };
    let run = match path_config.mode {
        PathMode::Backward => solver.backward(&grid, seed),
        PathMode::Forward => solver.forward(&grid, seed),
        PathMode::NonPathwise => solver.non_pathwise(&grid, seed),
    };
    let mut entries = std::mem::take(&mut solver.entries);
    entries.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    let mut result = PathResult {
        config: net_config.clone(),
        entries,
        warnings: Vec::new(),
    };
    if let Err((lambda, source)) = run {
        return Err(Error::PathFailed {
            lambda,
            source: Box::new(source),
            partial: Box::new(result),
        });
    }
    if let Some(last) = result.entries.last() {
        if !last.selected.is_empty() {
            result.warnings.push(PathWarning::NotNullAtLambdaMax {
                lambda: last.lambda,
                model_size: last.selected.len(),
            });
        }
    }
    Ok(result)
}

struct Solver<'a> {
    full: &'a Dataset,
    validation: Option<&'a Dataset>,
    full_config: NetworkConfig,
    fit_config: &'a FitConfig,
    path_config: &'a PathConfig,
    entries: Vec<PathEntry>,
}

/// A network over a subset of the original inputs.
struct Working {
    config: NetworkConfig,
    params: NetworkParams,
    index_map: Vec<usize>,
    train: Dataset,
    valid: Option<Dataset>,
}

type StepResult = std::result::Result<(), (f64, Error)>;

impl Solver<'_> {
    fn fresh(&self, seed: u64) -> Working {
        Working {
            config: self.full_config.clone(),
            params: init_params(&self.full_config, seed),
            index_map: (0..self.full.d()).collect(),
            train: self.full.clone(),
            valid: self.validation.cloned(),
        }
    }

    /// Fits `w` at `lambda` and records the entry; `w.params` becomes the solution.
    fn fit_point(&mut self, w: &mut Working, lambda: f64, epochs: usize) -> StepResult {
        let fc = FitConfig {
            epochs,
            ..self.fit_config.clone()
        };
        let spec = self.path_config.spec(lambda);
        let init = std::mem::replace(&mut w.params, NetworkParams::zeros(&w.config));
        let res = fit(&w.train, &w.config, &fc, &spec, init).map_err(|e| (lambda, e))?;
        let validation_loss = w.valid.as_ref().map(|v| score(&w.config, &res.params, v));
        let full = embed_inputs(&res.params, &w.index_map, self.full.d()).map_err(|e| (lambda, e))?;
        self.entries.push(PathEntry {
            lambda,
            params: full,
            selected: res.selected.iter().map(|&j| w.index_map[j]).collect(),
            validation_loss,
            epochs_run: res.epochs_run,
            work: res.epochs_run as u64 * w.config.gradient_flops(w.train.n()),
        });
        w.params = res.params;
        Ok(())
    }

    fn backward(&mut self, grid: &[f64], seed: u64) -> StepResult {
        let mut w = self.fresh(seed);
        for (k, &lambda) in grid.iter().enumerate() {
            let epochs = if k == 0 {
                self.path_config.epochs_first
            } else {
                self.path_config.epochs_rest
            };
            self.fit_point(&mut w, lambda, epochs)?;
            if self.path_config.prune {
                let keep = w.params.selected();
                if keep.len() < w.config.input_dim {
                    prune(&mut w, &keep, self.full, self.validation).map_err(|e| (lambda, e))?;
                }
            }
        }
        Ok(())
    }

    fn forward(&mut self, grid: &[f64], seed: u64) -> StepResult {
        let mut w = self.fresh(seed);
        for (k, &lambda) in grid.iter().rev().enumerate() {
            if k > 0 && w.params.selected().is_empty() {
                w.params = init_params(&w.config, seed::derive(seed, seed::STREAM_INIT, k as u64));
            }
            let epochs = if k == 0 {
                self.path_config.epochs_first
            } else {
                self.path_config.epochs_rest
            };
            self.fit_point(&mut w, lambda, epochs)?;
        }
        Ok(())
    }

    fn non_pathwise(&mut self, grid: &[f64], seed: u64) -> StepResult {
        for (k, &lambda) in grid.iter().enumerate() {
            let mut w = self.fresh(seed::derive(seed, seed::STREAM_INIT, k as u64));
            self.fit_point(&mut w, lambda, self.path_config.epochs_first)?;
        }
        Ok(())
    }
}

fn prune(w: &mut Working, keep: &[usize], full: &Dataset, validation: Option<&Dataset>) -> Result<()> {
    let (params, config, local) = prune_inputs(&w.config, &w.params, keep)?;
    w.index_map = local.iter().map(|&j| w.index_map[j]).collect();
    w.params = params;
    w.config = config;
    w.train = full.with_columns(&w.index_map);
    w.valid = validation.map(|v| v.with_columns(&w.index_map));
    Ok(())
}

/// Native loss of a model on held-out rows; +inf when undefined.
pub(crate) fn score(config: &NetworkConfig, params: &NetworkParams, data: &Dataset) -> f64 {
    net::forward_batch(config, params, &data.x)
        .and_then(|pred| loss::evaluate(&pred, &data.outcome))
        .map(|l| if l.value.is_finite() { l.value } else { f64::INFINITY })
        .unwrap_or(f64::INFINITY)
}

/// Group norms along the path: row `k`, column `j` is `|W_{0,j}|` at lambda_k.
pub fn path_norms(path: &PathResult) -> Matrix {
    let d = path.config.input_dim;
    let mut out = Matrix::zeros(path.entries.len(), d);
    for (k, e) in path.entries.iter().enumerate() {
        for (j, v) in e.params.group_norms().into_iter().enumerate() {
            out.set(k, j, v);
        }
    }
    out
}

/// Writes `lambda,variable_index,group_norm,selected`, one row per
/// (lambda, variable) with 1-based variable indices.
pub fn write_path_csv<W: Write>(path: &PathResult, writer: W) -> Result<()> {
    let norms = path_norms(path);
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["lambda", "variable_index", "group_norm", "selected"])?;
    for (k, e) in path.entries.iter().enumerate() {
        let lam = fmt_float(e.lambda);
        for j in 0..norms.cols() {
            let sel = if e.selected.binary_search(&j).is_ok() { "1" } else { "0" };
            w.write_record([lam.as_str(), &(j + 1).to_string(), &fmt_float(norms.get(k, j)), sel])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_by_hand() {
        let g = lambda_grid(0.01, 1.0, 3).unwrap();
        assert_eq!(g[0], 0.01);
        assert!((g[1] - 0.1).abs() < 1e-15);
        assert_eq!(g[2], 1.0);
    }

    #[test]
    fn grid_has_constant_ratio() {
        let g = lambda_grid(1e-3, 0.5, 50).unwrap();
        assert_eq!((g[0], g[49]), (1e-3, 0.5));
        let r = g[1] / g[0];
        for w in g.windows(2) {
            assert!((w[1] / w[0] - r).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_rejects_bad_ranges() {
        assert!(lambda_grid(0.0, 1.0, 5).is_err());
        assert!(lambda_grid(1.0, 1.0, 5).is_err());
        assert!(lambda_grid(0.1, 1.0, 1).is_err());
        assert_eq!(lambda_grid(0.3, 0.3, 1).unwrap(), vec![0.3]);
    }

    #[test]
    fn presets() {
        let ld = PathConfig::preset(Preset::Ld, PenaltyFamily::GroupMcp);
        assert_eq!((ld.lambda_min, ld.lambda_max, ld.epochs_first, ld.epochs_rest), (1e-3, 0.5, 2000, 200));
        let hd = PathConfig::preset(Preset::Hd, PenaltyFamily::GroupScad);
        assert_eq!((hd.lambda_min, hd.epochs_first), (1e-2, 200));
        assert_eq!(hd.spec(0.1).a, 3.7);
        assert_eq!("hd".parse::<Preset>().unwrap(), Preset::Hd);
    }
}
