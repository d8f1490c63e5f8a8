//! JSON configuration files and command-line overrides.
//!
//! A flag `--foo-bar VALUE` replaces the top-level JSON field `foo_bar`. The
//! value is parsed as JSON when it parses, and taken as a string otherwise,
//! so `--seed 7`, `--oracle false` and `--penalty group-scad` all work.
//! `--set key=value` reaches any field without a dedicated flag.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use gcnet_core::path::{lambda_grid, PathConfig, PathMode, Preset};
use gcnet_core::{FitConfig, NetworkConfig, OptimizerKind, OutcomeKind, PenaltyFamily, TuneConfig};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

/// Reads a JSON object, applies overrides, and deserializes it.
pub fn load<T: DeserializeOwned>(path: &Path, overrides: &[(String, String)]) -> Result<T, CliError> {
    let file = File::open(path).map_err(|e| CliError::Config(format!("cannot open {}: {e}", path.display())))?;
    let value: Value = serde_json::from_reader(BufReader::new(file))
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    from_value(value, overrides)
}

pub fn from_value<T: DeserializeOwned>(value: Value, overrides: &[(String, String)]) -> Result<T, CliError> {
    let Value::Object(mut map) = value else {
        return Err(CliError::Config("config file must hold a JSON object".into()));
    };
    apply_overrides(&mut map, overrides);
    serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Config(e.to_string()))
}

pub fn apply_overrides(map: &mut Map<String, Value>, overrides: &[(String, String)]) {
    for (key, raw) in overrides {
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.clone()));
        map.insert(key.replace('-', "_"), value);
    }
}

/// Splits `key=value` from `--set`.
pub fn parse_set(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.to_string()))
        .filter(|(k, _)| !k.is_empty())
        .ok_or_else(|| format!("expected KEY=VALUE, got '{s}'"))
}

fn default_widths() -> Vec<usize> {
    vec![10, 5]
}

fn default_true() -> bool {
    true
}

fn default_holdout() -> f64 {
    0.2
}

fn default_learning_rate() -> f64 {
    0.001
}

fn default_alpha() -> f64 {
    0.01
}

/// Settings shared by `path` and `tune`. Grid fields left unset come from
/// `preset` (default `ld`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub model: OutcomeKind,
    #[serde(default = "default_widths")]
    pub hidden_widths: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub preset: Option<Preset>,
    #[serde(default)]
    pub penalty: Option<PenaltyFamily>,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub lambda_min: Option<f64>,
    #[serde(default)]
    pub lambda_max: Option<f64>,
    #[serde(default)]
    pub num_lambdas: Option<usize>,
    #[serde(default)]
    pub epochs_first: Option<usize>,
    #[serde(default)]
    pub epochs_rest: Option<usize>,
    #[serde(default = "default_true")]
    pub prune: bool,
    #[serde(default)]
    pub mode: PathMode,
    /// Ridge coefficient for `path`.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub alpha_min: Option<f64>,
    #[serde(default)]
    pub alpha_max: Option<f64>,
    #[serde(default)]
    pub num_alphas: Option<usize>,
    /// Explicit alpha grid for `tune`; overrides the range fields.
    #[serde(default)]
    pub alpha_grid: Option<Vec<f64>>,
    #[serde(default = "default_holdout")]
    pub holdout_fraction: f64,
    #[serde(default = "default_true")]
    pub stratify: bool,
    #[serde(default)]
    pub refit: bool,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default)]
    pub optimizer: OptimizerKind,
    #[serde(default)]
    pub convergence_tol: f64,
}

impl TrainConfig {
    fn preset(&self) -> Preset {
        self.preset.unwrap_or(Preset::Ld)
    }

    pub fn network(&self, d: usize) -> NetworkConfig {
        NetworkConfig::new(d, self.hidden_widths.clone())
    }

    pub fn fit(&self) -> FitConfig {
        FitConfig {
            alpha: self.alpha,
            learning_rate: self.learning_rate,
            optimizer: self.optimizer,
            convergence_tol: self.convergence_tol,
            seed: self.seed,
            ..FitConfig::default()
        }
    }

    pub fn path(&self) -> PathConfig {
        let preset = self.preset();
        let mut cfg = PathConfig::preset(preset, self.penalty.unwrap_or(PenaltyFamily::GroupMcp));
        cfg.lambda_min = self.lambda_min.unwrap_or(cfg.lambda_min);
        cfg.lambda_max = self.lambda_max.unwrap_or(cfg.lambda_max);
        cfg.num_lambdas = self.num_lambdas.unwrap_or(cfg.num_lambdas);
        cfg.epochs_first = self.epochs_first.unwrap_or(cfg.epochs_first);
        cfg.epochs_rest = self.epochs_rest.unwrap_or(cfg.epochs_rest);
        cfg.prune = self.prune;
        cfg.a = self.a;
        cfg.mode = self.mode;
        cfg
    }

    pub fn tune(&self) -> gcnet_core::Result<TuneConfig> {
        let alpha_grid = match &self.alpha_grid {
            Some(grid) => grid.clone(),
            None => {
                let (lo, hi) = self.preset().alpha_range();
                let (lo, hi) = (self.alpha_min.unwrap_or(lo), self.alpha_max.unwrap_or(hi));
                match self.num_alphas.unwrap_or(10) {
                    1 => vec![lo],
                    m => lambda_grid(lo, hi, m)?,
                }
            }
        };
        Ok(TuneConfig {
            alpha_grid,
            path: self.path(),
            holdout_fraction: self.holdout_fraction,
            stratify: self.stratify,
            refit: self.refit,
            seed: self.seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn pairs(items: &[(&str, &str)]) -> Vec<(String, String)> {
        items.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn overrides_replace_fields() {
        let base = json!({"model": "regression", "seed": 1, "penalty": "group-lasso"});
        let cfg: TrainConfig =
            from_value(base, &pairs(&[("seed", "9"), ("penalty", "group-scad"), ("num-lambdas", "7")])).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.penalty, Some(PenaltyFamily::GroupScad));
        assert_eq!(cfg.path().num_lambdas, 7);
    }

    #[test]
    fn preset_fills_grids() {
        let cfg: TrainConfig = from_value(json!({"model": "survival", "preset": "hd"}), &[]).unwrap();
        let path = cfg.path();
        assert_eq!((path.lambda_min, path.lambda_max, path.epochs_first), (1e-2, 0.5, 200));
        let tune = cfg.tune().unwrap();
        assert_eq!(tune.alpha_grid.len(), 10);
        assert_eq!(tune.alpha_grid[0], 1e-2);
    }

    #[test]
    fn unknown_fields_are_config_errors() {
        let err = from_value::<TrainConfig>(json!({"model": "regression", "lamda_min": 0.1}), &[]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(from_value::<TrainConfig>(json!([1, 2]), &[]).is_err());
    }

    #[test]
    fn set_parsing() {
        assert_eq!(parse_set("a=b=c").unwrap(), ("a".into(), "b=c".into()));
        assert!(parse_set("novalue").is_err());
        assert!(parse_set("=3").is_err());
    }
}
