//! Sparse-input neural networks with group concave penalties.
//!
//! Feature selection and nonlinear function estimation in one fit: the
//! outgoing weights of each input variable form a group, and a group lasso,
//! MCP or SCAD penalty on the group norms drives whole inputs to exactly zero.
//! Training alternates a smooth gradient step with the penalty's closed-form
//! group thresholding; models are fitted along a dense-to-sparse lambda path
//! with warm starts and input pruning, and `(lambda, alpha)` is chosen on a
//! holdout split.
//!
//! Regression (squared error), binary classification (cross-entropy) and
//! right-censored survival (Cox partial likelihood) outcomes are supported.
//!
//! ```no_run
//! use gcnet_core::{simdata, path, optimizer::FitConfig, NetworkConfig, OutcomeKind, PenaltyFamily};
//!
//! # fn main() -> gcnet_core::Result<()> {
//! let (data, _) = simdata::gen_dataset(&simdata::SimConfig::new(300, 20, OutcomeKind::Regression, 1))?;
//! let net = NetworkConfig::new(20, vec![10, 5]);
//! let fit = FitConfig { alpha: 0.01, ..FitConfig::default() };
//! let cfg = path::PathConfig::preset(path::Preset::Ld, PenaltyFamily::GroupMcp);
//! let result = path::solve_path(&data, &net, &fit, &cfg, 7)?;
//! for e in &result.entries {
//!     println!("{:.4} {:?}", e.lambda, e.selected);
//! }
//! # Ok(())
//! # }
//! ```

pub mod dataset;
pub mod error;
pub mod experiment;
pub mod loss;
pub mod matrix;
pub mod metrics;
pub mod model;
pub mod net;
pub mod optimizer;
pub mod path;
pub mod penalty;
pub mod seed;
pub mod simdata;
pub mod tuner;

pub use dataset::{Dataset, Outcome, OutcomeKind};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use model::Model;
pub use net::{Activation, Gradient, NetworkConfig, NetworkParams};
pub use optimizer::{FitConfig, FitResult, OptimizerKind};
pub use path::{PathConfig, PathMode, PathResult};
pub use penalty::{PenaltyFamily, PenaltySpec};
pub use tuner::{TuneConfig, TuneResult};

/// Formats a float with 17 significant digits, enough to round-trip any f64.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}
