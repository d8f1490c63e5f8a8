//! Composite gradient descent on the penalized objective
//!
//! `L_n(w) + sum_j rho_lambda(|W_{0,j}|) + alpha |w|^2`.
//!
//! Each epoch takes one full-batch step on the smooth part `L_n + alpha |w|^2`
//! (Adam or plain gradient descent), then replaces every input group by the
//! penalty's thresholding operator at `lambda`. Groups zeroed by the operator
//! are exactly zero; their Adam moments are cleared at the same time.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::loss;
use crate::net::{self, Gradient, NetworkConfig, NetworkParams, Scratch};
use crate::penalty::PenaltySpec;
use crate::{Error, Result};

/// Epoch window for the early-stopping test.
pub const CONVERGENCE_WINDOW: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerKind {
    #[default]
    Adam,
    PlainSgd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    /// Ridge coefficient on all weights and biases.
    pub alpha: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub optimizer: OptimizerKind,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    /// Stop once the objective moves less than this over the last
    /// [`CONVERGENCE_WINDOW`] epochs; 0 disables early stopping.
    pub convergence_tol: f64,
    /// Initialization seed for callers that start from fresh parameters.
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            learning_rate: 0.001,
            epochs: 200,
            optimizer: OptimizerKind::Adam,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            convergence_tol: 0.0,
            seed: 0,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning_rate must be positive".into()));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidConfig("alpha must be non-negative".into()));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return Err(Error::InvalidConfig("Adam betas must lie in [0, 1)".into()));
        }
        if !(self.adam_eps >= 0.0) || !(self.convergence_tol >= 0.0) {
            return Err(Error::InvalidConfig("adam_eps and convergence_tol must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: NetworkParams,
    /// Objective after each completed epoch.
    pub objective_trace: Vec<f64>,
    /// Inputs whose group is not exactly zero.
    pub selected: Vec<usize>,
    pub epochs_run: usize,
}

/// Penalized objective: loss + group penalty + `alpha * |w|^2`.
pub fn objective(
    config: &NetworkConfig,
    params: &NetworkParams,
    dataset: &Dataset,
    spec: &PenaltySpec,
    alpha: f64,
) -> Result<f64> {
    let pred = net::forward_batch(config, params, &dataset.x)?;
    let l = loss::evaluate(&pred, &dataset.outcome)?;
    Ok(l.value + penalty_sum(params, spec) + alpha * params.squared_norm())
}

/// Sum of the penalty over all input-group norms.
pub fn penalty_sum(params: &NetworkParams, spec: &PenaltySpec) -> f64 {
    if spec.lambda == 0.0 {
        return 0.0;
    }
    params.group_norms().into_iter().map(|t| spec.value(t)).sum()
}

/// Runs composite gradient descent from `init`.
pub fn fit(
    dataset: &Dataset,
    config: &NetworkConfig,
    fit_config: &FitConfig,
    spec: &PenaltySpec,
    init: NetworkParams,
) -> Result<FitResult> {
    fit_inner(dataset, config, fit_config, spec, init, true)
}

pub(crate) fn fit_inner(
    dataset: &Dataset,
    config: &NetworkConfig,
    fit_config: &FitConfig,
    spec: &PenaltySpec,
    init: NetworkParams,
    apply_prox: bool,
) -> Result<FitResult> {
    fit_config.validate()?;
    spec.validate()?;
    // A fully pruned network has no inputs; only its biases still train.
    if config.input_dim > 0 {
        config.validate()?;
    }
    init.check_shape(config)?;
    net::check_input(&init, &dataset.x)?;
    if dataset.n() == 0 {
        return Err(Error::InvalidData("empty dataset".into()));
    }

    let mut trainer = Trainer::new(init, fit_config);
    let mut trace = Vec::with_capacity(fit_config.epochs);
    let mut epochs_run = 0;
    for epoch in 0..fit_config.epochs {
        let obj = trainer.evaluate(config, dataset, spec, fit_config.alpha)?;
        if !obj.is_finite() {
            return Err(Error::Diverged { epoch, value: obj });
        }
        if epoch > 0 {
            trace.push(obj);
            if converged(&trace, fit_config.convergence_tol) {
                break;
            }
        }
        trainer.step(config, dataset, fit_config)?;
        if apply_prox {
            trainer.threshold_inputs(spec);
        }
        epochs_run += 1;
    }
    let last = trainer.evaluate(config, dataset, spec, fit_config.alpha)?;
    if !last.is_finite() {
        return Err(Error::Diverged {
            epoch: epochs_run,
            value: last,
        });
    }
    if trace.len() < epochs_run {
        trace.push(last);
    }

    let params = trainer.params;
    let selected = params.selected();
    Ok(FitResult {
        params,
        objective_trace: trace,
        selected,
        epochs_run,
    })
}

fn converged(trace: &[f64], tol: f64) -> bool {
    if tol <= 0.0 || trace.len() <= CONVERGENCE_WINDOW {
        return false;
    }
    let last = trace[trace.len() - 1];
    (last - trace[trace.len() - 1 - CONVERGENCE_WINDOW]).abs() < tol
}

/// Optimizer state for one fit.
struct Trainer {
    params: NetworkParams,
    grad: Gradient,
    /// Adam first and second moments.
    moments: Option<(NetworkParams, NetworkParams)>,
    steps: i32,
    scratch: Scratch,
    upstream: Vec<f64>,
    column: Vec<f64>,
    /// Whether `scratch` and `upstream` match the current `params`.
    fresh: bool,
}

impl Trainer {
    fn new(params: NetworkParams, fit_config: &FitConfig) -> Self {
        let zeros = params.zeros_like();
        let moments = (fit_config.optimizer == OptimizerKind::Adam)
            .then(|| (zeros.clone(), zeros.clone()));
        Self {
            grad: Gradient(zeros),
            moments,
            params,
            steps: 0,
            scratch: Scratch::default(),
            upstream: Vec::new(),
            column: Vec::new(),
            fresh: false,
        }
    }

    /// Objective at the current parameters; caches the forward pass and loss
    /// derivative for the next step.
    fn evaluate(
        &mut self,
        config: &NetworkConfig,
        dataset: &Dataset,
        spec: &PenaltySpec,
        alpha: f64,
    ) -> Result<f64> {
        net::forward_cached(config, &self.params, &dataset.x, &mut self.scratch);
        let out = self.scratch.output();
        if out.iter().any(|v| !v.is_finite()) {
            self.fresh = false;
            return Ok(f64::NAN);
        }
        let l = loss::evaluate(out, &dataset.outcome)?;
        self.upstream = l.upstream;
        self.fresh = true;
        Ok(l.value + penalty_sum(&self.params, spec) + alpha * self.params.squared_norm())
    }

    fn step(&mut self, config: &NetworkConfig, dataset: &Dataset, fc: &FitConfig) -> Result<()> {
        debug_assert!(self.fresh, "step requires a preceding evaluate");
        net::backward_cached(
            config,
            &self.params,
            &dataset.x,
            &self.upstream,
            &mut self.scratch,
            &mut self.grad,
        )?;
        self.fresh = false;
        let two_alpha = 2.0 * fc.alpha;
        let lr = fc.learning_rate;
        match fc.optimizer {
            OptimizerKind::PlainSgd => {
                for (w, g) in self.params.iter_mut().zip(self.grad.0.iter()) {
                    *w -= lr * (g + two_alpha * *w);
                }
            }
            OptimizerKind::Adam => {
                let (first, second) = self.moments.as_mut().expect("Adam moments");
                self.steps += 1;
                let (b1, b2, eps) = (fc.adam_beta1, fc.adam_beta2, fc.adam_eps);
                let c1 = 1.0 - b1.powi(self.steps);
                let c2 = 1.0 - b2.powi(self.steps);
                for (((w, g), m), v) in self
                    .params
                    .iter_mut()
                    .zip(self.grad.0.iter())
                    .zip(first.iter_mut())
                    .zip(second.iter_mut())
                {
                    let g = g + two_alpha * *w;
                    *m = b1 * *m + (1.0 - b1) * g;
                    *v = b2 * *v + (1.0 - b2) * g * g;
                    let m_hat = *m / c1;
                    let v_hat = *v / c2;
                    *w -= lr * m_hat / (v_hat.sqrt() + eps);
                }
            }
        }
        Ok(())
    }

    /// Applies the group thresholding operator to every input column.
    fn threshold_inputs(&mut self, spec: &PenaltySpec) {
        let w0 = self.params.input_layer_mut();
        let (rows, cols) = (w0.rows(), w0.cols());
        for j in 0..cols {
            self.column.clear();
            self.column.extend((0..rows).map(|r| w0.get(r, j)));
            let zeroed = spec.prox_in_place(&mut self.column);
            w0.set_column(j, &self.column);
            if let (true, Some((first, second))) = (zeroed, self.moments.as_mut()) {
                for r in 0..rows {
                    first.weights[0].set(r, j, 0.0);
                    second.weights[0].set(r, j, 0.0);
                }
            }
        }
    }
}
