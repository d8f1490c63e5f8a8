//! Synthetic benchmark data with a sparse nonlinear signal.
//!
//! Only the first four covariates enter
//! `f(x) = log(|x1| + 0.1) + x1 x2 + x2 + exp(x3 + x4)`.
//! Outcomes are Gaussian regression, logistic classification, or
//! proportional-hazards survival times with a Weibull baseline and uniform
//! censoring.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Outcome, OutcomeKind};
use crate::loss::sigmoid;
use crate::matrix::Matrix;
use crate::seed::{derive, STREAM_COVARIATES, STREAM_OUTCOME};
use crate::{Error, Result};

/// Weibull baseline: `H0(t) = (t / scale)^shape`.
pub const WEIBULL_SCALE: f64 = 2.0;
pub const WEIBULL_SHAPE: f64 = 2.0;

/// 0-based indices of the relevant covariates.
pub const TRUE_SUPPORT: [usize; 4] = [0, 1, 2, 3];

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Correlation {
    #[default]
    Independent,
    /// Gaussian rows with `corr(x_i, x_j) = rho^|i-j|`.
    Ar(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub d: usize,
    pub outcome: OutcomeKind,
    #[serde(default)]
    pub censoring_rate: f64,
    #[serde(default)]
    pub correlation: Correlation,
    #[serde(default)]
    pub seed: u64,
}

impl SimConfig {
    pub fn new(n: usize, d: usize, outcome: OutcomeKind, seed: u64) -> Self {
        Self {
            n,
            d,
            outcome,
            censoring_rate: 0.0,
            correlation: Correlation::Independent,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d <= 4 {
            return Err(Error::InvalidConfig(format!("d must exceed 4, got {}", self.d)));
        }
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.censoring_rate) {
            return Err(Error::InvalidConfig(format!(
                "censoring_rate must lie in [0, 1), got {}",
                self.censoring_rate
            )));
        }
        if let Correlation::Ar(rho) = self.correlation {
            if !(rho.abs() < 1.0) {
                return Err(Error::InvalidConfig(format!("AR coefficient must satisfy |rho| < 1, got {rho}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTruth {
    /// Always [`TRUE_SUPPORT`].
    pub support: Vec<usize>,
    pub f_values: Vec<f64>,
    /// Uncensored event times (survival only).
    pub latent_time: Option<Vec<f64>>,
}

pub fn true_f(x: &[f64]) -> f64 {
    (x[0].abs() + 0.1).ln() + x[0] * x[1] + x[1] + (x[2] + x[3]).exp()
}

pub fn gen_covariates(config: &SimConfig) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(derive(config.seed, STREAM_COVARIATES, 0));
    let (n, d) = (config.n, config.d);
    let mut x = Matrix::zeros(n, d);
    match config.correlation {
        Correlation::Independent => {
            for v in x.as_mut_slice() {
                *v = rng.sample(StandardNormal);
            }
        }
        Correlation::Ar(rho) => {
            let innovation = (1.0 - rho * rho).sqrt();
            for i in 0..n {
                let row = x.row_mut(i);
                row[0] = rng.sample(StandardNormal);
                for j in 1..d {
                    let e: f64 = rng.sample(StandardNormal);
                    row[j] = rho * row[j - 1] + innovation * e;
                }
            }
        }
    }
    x
}

pub fn gen_outcome(x: &Matrix, config: &SimConfig) -> Result<(Outcome, SimTruth)> {
    config.validate()?;
    if x.cols() < 4 {
        return Err(Error::Dimension("need at least 4 covariates".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive(config.seed, STREAM_OUTCOME, 0));
    let f: Vec<f64> = (0..x.rows()).map(|i| true_f(x.row(i))).collect();
    let mut latent_time = None;
    let outcome = match config.outcome {
        OutcomeKind::Regression => Outcome::Continuous(
            f.iter()
                .map(|&v| v + rng.sample::<f64, _>(StandardNormal))
                .collect(),
        ),
        OutcomeKind::Classification => Outcome::Binary(
            f.iter()
                .map(|&v| {
                    let u: f64 = rng.random();
                    if u < sigmoid(v) {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect(),
        ),
        OutcomeKind::Survival => {
            let draw = draw_survival(&f, config.censoring_rate, &mut rng);
            latent_time = Some(draw.latent);
            Outcome::Survival {
                time: draw.time,
                event: draw.event,
            }
        }
    };
    Ok((
        outcome,
        SimTruth {
            support: TRUE_SUPPORT.to_vec(),
            f_values: f,
            latent_time,
        },
    ))
}

pub fn gen_dataset(config: &SimConfig) -> Result<(Dataset, SimTruth)> {
    config.validate()?;
    let x = gen_covariates(config);
    let (outcome, truth) = gen_outcome(&x, config)?;
    Ok((Dataset::new(x, outcome)?, truth))
}

pub fn baseline_cumulative_hazard(t: f64) -> f64 {
    (t / WEIBULL_SCALE).powf(WEIBULL_SHAPE)
}

pub fn inverse_baseline_cumulative_hazard(v: f64) -> f64 {
    WEIBULL_SCALE * v.powf(1.0 / WEIBULL_SHAPE)
}

/// Event time for log-hazard ratio `f`, inverting `S(t) = exp(-H0(t) e^f)` at `u`.
pub fn survival_time(u: f64, f: f64) -> f64 {
    inverse_baseline_cumulative_hazard(-u.ln() * (-f).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalDraw {
    pub time: Vec<f64>,
    pub event: Vec<bool>,
    pub latent: Vec<f64>,
}

/// Draws event times for the given log-hazard ratios and censors exactly
/// `round(rate * n)` rows chosen uniformly without replacement; a censored
/// row observes a time uniform on `(0, T_i)`.
pub fn draw_survival<R: Rng + ?Sized>(f: &[f64], censoring_rate: f64, rng: &mut R) -> SurvivalDraw {
    let n = f.len();
    let latent: Vec<f64> = f
        .iter()
        .map(|&v| {
            let u: f64 = rng.sample(Open01);
            survival_time(u, v)
        })
        .collect();
    let mut time = latent.clone();
    let mut event = vec![true; n];
    let k = (censoring_rate * n as f64).round() as usize;
    let mut chosen = sample(rng, n, k.min(n)).into_vec();
    chosen.sort_unstable();
    for i in chosen {
        let u: f64 = rng.sample(Open01);
        let c = u * latent[i];
        time[i] = if c < latent[i] { c } else { latent[i].next_down() };
        event[i] = false;
    }
    SurvivalDraw { time, event, latent }
}
