//! Dense feed-forward network with scalar output.
//!
//! Layer `i` computes `W_i a + b_i` with `W_i` of shape `d_{i+1} x d_i`
//! (row-major); hidden layers apply ReLU, the output layer is affine. Column
//! `j` of the first weight matrix is the group of outgoing weights of input
//! variable `j`; zeroing it removes that variable from the model.
//!
//! Gradients are hand-derived per layer. The ReLU subgradient at 0 is 0.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::{Error, Result};

/// Standard deviation of the Gaussian weight initializer.
pub const INIT_STD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Relu,
}

impl Activation {
    #[inline]
    fn apply(self, v: f64) -> f64 {
        match self {
            Activation::Relu => v.max(0.0),
        }
    }

    /// Derivative expressed through the activation's output.
    #[inline]
    fn derivative_from_output(self, out: f64) -> f64 {
        match self {
            Activation::Relu => {
                if out > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub input_dim: usize,
    pub hidden_widths: Vec<usize>,
    #[serde(default)]
    pub activation: Activation,
}

impl NetworkConfig {
    pub fn new(input_dim: usize, hidden_widths: Vec<usize>) -> Self {
        Self {
            input_dim,
            hidden_widths,
            activation: Activation::Relu,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 {
            return Err(Error::InvalidConfig("input_dim must be at least 1".into()));
        }
        if self.hidden_widths.contains(&0) {
            return Err(Error::InvalidConfig("hidden widths must be positive".into()));
        }
        Ok(())
    }

    /// Layer widths `d_0, d_1, ..., d_D, 1`.
    pub fn layer_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.hidden_widths.len() + 2);
        dims.push(self.input_dim);
        dims.extend_from_slice(&self.hidden_widths);
        dims.push(1);
        dims
    }

    pub fn num_params(&self) -> usize {
        self.layer_dims()
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum()
    }

    /// Multiply-adds for one full-batch forward plus backward pass over `n` rows.
    pub fn gradient_flops(&self, n: usize) -> u64 {
        let macs: usize = self.layer_dims().windows(2).map(|w| w[0] * w[1]).sum();
        3 * (n as u64) * (macs as u64)
    }

    pub fn with_input_dim(&self, input_dim: usize) -> Self {
        Self {
            input_dim,
            ..self.clone()
        }
    }
}

/// All weight matrices and bias vectors of a network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    pub weights: Vec<Matrix>,
    pub biases: Vec<Vec<f64>>,
}

/// Partial derivatives of a scalar objective, laid out like [`NetworkParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient(pub NetworkParams);

impl NetworkParams {
    pub fn zeros(config: &NetworkConfig) -> Self {
        let dims = config.layer_dims();
        let weights = dims.windows(2).map(|w| Matrix::zeros(w[1], w[0])).collect();
        let biases = dims.windows(2).map(|w| vec![0.0; w[1]]).collect();
        Self { weights, biases }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            weights: self
                .weights
                .iter()
                .map(|w| Matrix::zeros(w.rows(), w.cols()))
                .collect(),
            biases: self.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.weights[0].cols()
    }

    /// The first-layer weight matrix, whose columns are the input groups.
    pub fn input_layer(&self) -> &Matrix {
        &self.weights[0]
    }

    pub fn input_layer_mut(&mut self) -> &mut Matrix {
        &mut self.weights[0]
    }

    /// Euclidean norm of every input group.
    pub fn group_norms(&self) -> Vec<f64> {
        let w0 = self.input_layer();
        (0..w0.cols()).map(|j| w0.column_norm(j)).collect()
    }

    /// Indices (into this network's inputs) of groups that are not exactly zero.
    pub fn selected(&self) -> Vec<usize> {
        let w0 = self.input_layer();
        (0..w0.cols()).filter(|&j| !w0.column_is_zero(j)).collect()
    }

    pub fn check_shape(&self, config: &NetworkConfig) -> Result<()> {
        let dims = config.layer_dims();
        if self.weights.len() != dims.len() - 1 || self.biases.len() != dims.len() - 1 {
            return Err(Error::Dimension(format!(
                "expected {} layers, found {} weight matrices and {} bias vectors",
                dims.len() - 1,
                self.weights.len(),
                self.biases.len()
            )));
        }
        for (i, w) in dims.windows(2).enumerate() {
            let m = &self.weights[i];
            if m.rows() != w[1] || m.cols() != w[0] {
                return Err(Error::Dimension(format!(
                    "layer {i}: weight is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    w[1],
                    w[0]
                )));
            }
            if self.biases[i].len() != w[1] {
                return Err(Error::Dimension(format!(
                    "layer {i}: bias has length {}, expected {}",
                    self.biases[i].len(),
                    w[1]
                )));
            }
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(Matrix::is_finite)
            && self.biases.iter().flatten().all(|v| v.is_finite())
    }

    /// Squared Euclidean norm over every weight and bias.
    pub fn squared_norm(&self) -> f64 {
        self.iter().map(|v| v * v).sum()
    }

    /// All parameters in a fixed order: per layer, weights row-major then bias.
    pub fn iter(&self) -> impl Iterator<Item = &f64> + '_ {
        self.weights
            .iter()
            .zip(&self.biases)
            .flat_map(|(w, b)| w.as_slice().iter().chain(b.iter()))
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut f64> + '_ {
        self.weights
            .iter_mut()
            .zip(self.biases.iter_mut())
            .flat_map(|(w, b)| w.as_mut_slice().iter_mut().chain(b.iter_mut()))
    }
}

/// Draws every weight i.i.d. from N(0, 0.1^2); biases start at zero.
pub fn init_params(config: &NetworkConfig, seed: u64) -> NetworkParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, INIT_STD).expect("valid normal");
    let mut params = NetworkParams::zeros(config);
    for w in &mut params.weights {
        for v in w.as_mut_slice() {
            *v = normal.sample(&mut rng);
        }
    }
    params
}

/// Evaluates the network at a single input.
pub fn forward(config: &NetworkConfig, params: &NetworkParams, x: &[f64]) -> Result<f64> {
    if x.len() != params.input_dim() {
        return Err(Error::Dimension(format!(
            "input has {} features, network expects {}",
            x.len(),
            params.input_dim()
        )));
    }
    let last = params.weights.len() - 1;
    let mut a = x.to_vec();
    for (i, (w, b)) in params.weights.iter().zip(&params.biases).enumerate() {
        let mut next = b.clone();
        for (k, out) in next.iter_mut().enumerate() {
            *out += dot(w.row(k), &a);
        }
        if i < last {
            for v in &mut next {
                *v = config.activation.apply(*v);
            }
        }
        a = next;
    }
    Ok(a[0])
}

/// Row-wise [`forward`] over a design matrix.
pub fn forward_batch(config: &NetworkConfig, params: &NetworkParams, x: &Matrix) -> Result<Vec<f64>> {
    check_input(params, x)?;
    let mut scratch = Scratch::default();
    forward_cached(config, params, x, &mut scratch);
    Ok(scratch.output().to_vec())
}

/// Gradient of a loss with respect to every parameter, given the derivative
/// of the loss with respect to each row's output (`upstream`).
///
/// The per-row contributions are summed; loss-level averaging belongs in
/// `upstream`.
pub fn backprop(
    config: &NetworkConfig,
    params: &NetworkParams,
    x: &Matrix,
    upstream: &[f64],
) -> Result<Gradient> {
    check_input(params, x)?;
    let mut scratch = Scratch::default();
    forward_cached(config, params, x, &mut scratch);
    let mut grad = Gradient(params.zeros_like());
    backward_cached(config, params, x, upstream, &mut scratch, &mut grad)?;
    Ok(grad)
}

pub(crate) fn check_input(params: &NetworkParams, x: &Matrix) -> Result<()> {
    if x.cols() != params.input_dim() {
        return Err(Error::Dimension(format!(
            "design matrix has {} columns, network expects {}",
            x.cols(),
            params.input_dim()
        )));
    }
    Ok(())
}

/// Reusable activation buffers for batched passes.
#[derive(Debug, Default)]
pub(crate) struct Scratch {
    /// Post-activation outputs of each layer; the last one is the network output.
    acts: Vec<Vec<f64>>,
    delta: Vec<f64>,
    delta_prev: Vec<f64>,
}

impl Scratch {
    pub(crate) fn output(&self) -> &[f64] {
        self.acts.last().map_or(&[], Vec::as_slice)
    }
}

pub(crate) fn forward_cached(
    config: &NetworkConfig,
    params: &NetworkParams,
    x: &Matrix,
    scratch: &mut Scratch,
) {
    let n = x.rows();
    let layers = params.weights.len();
    scratch.acts.resize_with(layers, Vec::new);
    for i in 0..layers {
        let w = &params.weights[i];
        let b = &params.biases[i];
        let (out_dim, in_dim) = (w.rows(), w.cols());
        let (prev, rest) = scratch.acts.split_at_mut(i);
        let input: &[f64] = if i == 0 { x.as_slice() } else { &prev[i - 1] };
        let out = &mut rest[0];
        out.clear();
        out.resize(n * out_dim, 0.0);
        let hidden = i + 1 < layers;
        for r in 0..n {
            let a = &input[r * in_dim..(r + 1) * in_dim];
            let o = &mut out[r * out_dim..(r + 1) * out_dim];
            for k in 0..out_dim {
                let z = b[k] + dot(w.row(k), a);
                o[k] = if hidden { config.activation.apply(z) } else { z };
            }
        }
    }
}

/// Accumulates the gradient into `grad` (overwriting it) from cached activations.
pub(crate) fn backward_cached(
    config: &NetworkConfig,
    params: &NetworkParams,
    x: &Matrix,
    upstream: &[f64],
    scratch: &mut Scratch,
    grad: &mut Gradient,
) -> Result<()> {
    let n = x.rows();
    if upstream.len() != n {
        return Err(Error::Dimension(format!(
            "upstream has length {}, batch has {n} rows",
            upstream.len()
        )));
    }
    if let Some(i) = upstream.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("upstream derivative at row {i}")));
    }
    let layers = params.weights.len();
    scratch.delta.clear();
    scratch.delta.extend_from_slice(upstream);

    for i in (0..layers).rev() {
        let w = &params.weights[i];
        let (out_dim, in_dim) = (w.rows(), w.cols());
        let input: &[f64] = if i == 0 { x.as_slice() } else { &scratch.acts[i - 1] };
        let gw = grad.0.weights[i].as_mut_slice();
        let gb = &mut grad.0.biases[i];
        gw.fill(0.0);
        gb.fill(0.0);
        for r in 0..n {
            let a = &input[r * in_dim..(r + 1) * in_dim];
            let d = &scratch.delta[r * out_dim..(r + 1) * out_dim];
            for k in 0..out_dim {
                let dk = d[k];
                if dk == 0.0 {
                    continue;
                }
                gb[k] += dk;
                axpy(dk, a, &mut gw[k * in_dim..(k + 1) * in_dim]);
            }
        }
        if i == 0 {
            break;
        }
        scratch.delta_prev.clear();
        scratch.delta_prev.resize(n * in_dim, 0.0);
        for r in 0..n {
            let a = &input[r * in_dim..(r + 1) * in_dim];
            let d = &scratch.delta[r * out_dim..(r + 1) * out_dim];
            let dp = &mut scratch.delta_prev[r * in_dim..(r + 1) * in_dim];
            for k in 0..out_dim {
                if d[k] != 0.0 {
                    axpy(d[k], w.row(k), dp);
                }
            }
            for (v, &act) in dp.iter_mut().zip(a) {
                *v *= config.activation.derivative_from_output(act);
            }
        }
        std::mem::swap(&mut scratch.delta, &mut scratch.delta_prev);
    }
    Ok(())
}

/// Drops input groups outside `keep`.
///
/// Returns the reduced parameters and config plus the map from each new
/// input position to its position in the original network.
pub fn prune_inputs(
    config: &NetworkConfig,
    params: &NetworkParams,
    keep: &[usize],
) -> Result<(NetworkParams, NetworkConfig, Vec<usize>)> {
    let d = params.input_dim();
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&j| j >= d) {
        return Err(Error::IndexOutOfRange { index: bad, dim: d });
    }
    let mut reduced = params.clone();
    reduced.weights[0] = params.weights[0].select_columns(&keep);
    let cfg = config.with_input_dim(keep.len());
    Ok((reduced, cfg, keep))
}

/// Inverse of [`prune_inputs`]: places reduced input groups back at their
/// original positions in a `full_dim`-input network, other groups zero.
pub fn embed_inputs(params: &NetworkParams, index_map: &[usize], full_dim: usize) -> Result<NetworkParams> {
    let w0 = params.input_layer();
    if index_map.len() != w0.cols() {
        return Err(Error::Dimension(format!(
            "index map has {} entries for {} inputs",
            index_map.len(),
            w0.cols()
        )));
    }
    let mut full = params.clone();
    let mut wide = Matrix::zeros(w0.rows(), full_dim);
    for (new, &orig) in index_map.iter().enumerate() {
        if orig >= full_dim {
            return Err(Error::IndexOutOfRange { index: orig, dim: full_dim });
        }
        for r in 0..w0.rows() {
            wide.set(r, orig, w0.get(r, new));
        }
    }
    full.weights[0] = wide;
    Ok(full)
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
        Matrix::from_vec(rows, cols, data).unwrap()
    }

    fn random_params(config: &NetworkConfig, seed: u64) -> NetworkParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = NetworkParams::zeros(config);
        for v in p.iter_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
        p
    }

    /// Independent evaluation: explicit matrix-vector products per layer.
    fn reference_forward(p: &NetworkParams, x: &[f64]) -> f64 {
        let mut a = x.to_vec();
        let last = p.weights.len() - 1;
        for i in 0..=last {
            let w = &p.weights[i];
            let mut z = vec![0.0; w.rows()];
            for k in 0..w.rows() {
                let mut s = 0.0;
                for j in 0..w.cols() {
                    s += w.get(k, j) * a[j];
                }
                z[k] = s + p.biases[i][k];
            }
            if i < last {
                z.iter_mut().for_each(|v| *v = if *v > 0.0 { *v } else { 0.0 });
            }
            a = z;
        }
        a[0]
    }

    #[test]
    fn init_linear_shapes_and_zero_bias() {
        let cfg = NetworkConfig::new(2, vec![]);
        let p = init_params(&cfg, 7);
        assert_eq!((p.weights[0].rows(), p.weights[0].cols()), (1, 2));
        assert_eq!(p.biases, vec![vec![0.0]]);
    }

    #[test]
    fn init_is_deterministic() {
        let cfg = NetworkConfig::new(6, vec![10, 5]);
        assert_eq!(init_params(&cfg, 3), init_params(&cfg, 3));
        assert_ne!(init_params(&cfg, 3), init_params(&cfg, 4));
    }

    #[test]
    fn init_std_matches_monte_carlo() {
        let cfg = NetworkConfig::new(1000, vec![100]);
        let p = init_params(&cfg, 11);
        let w = p.weights[0].as_slice();
        assert_eq!(w.len(), 100_000);
        let mean = w.iter().sum::<f64>() / w.len() as f64;
        let var = w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (w.len() - 1) as f64;
        assert!((var.sqrt() - 0.1).abs() < 0.005, "std {}", var.sqrt());
        assert!(mean.abs() < 0.005);
    }

    #[test]
    fn forward_linear_by_hand() {
        let cfg = NetworkConfig::new(2, vec![]);
        let p = NetworkParams {
            weights: vec![Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap()],
            biases: vec![vec![0.5]],
        };
        assert_eq!(forward(&cfg, &p, &[1.0, 1.0]).unwrap(), 3.5);
    }

    #[test]
    fn zero_weights_give_output_bias() {
        let cfg = NetworkConfig::new(3, vec![4, 2]);
        let mut p = NetworkParams::zeros(&cfg);
        p.biases[0] = vec![0.3; 4];
        p.biases[2] = vec![-1.25];
        assert_eq!(forward(&cfg, &p, &[5.0, -2.0, 9.0]).unwrap(), -1.25);
    }

    #[test]
    fn forward_matches_reference() {
        let cfg = NetworkConfig::new(5, vec![7, 3]);
        let p = random_params(&cfg, 1);
        let x = random_matrix(20, 5, 2);
        for r in 0..20 {
            let got = forward(&cfg, &p, x.row(r)).unwrap();
            assert!((got - reference_forward(&p, x.row(r))).abs() < 1e-12);
        }
    }

    #[test]
    fn forward_rejects_wrong_width() {
        let cfg = NetworkConfig::new(3, vec![2]);
        let p = NetworkParams::zeros(&cfg);
        assert!(matches!(forward(&cfg, &p, &[1.0]), Err(Error::Dimension(_))));
        let x = Matrix::zeros(4, 2);
        assert!(forward_batch(&cfg, &p, &x).is_err());
    }

    #[test]
    fn batch_equals_row_loop() {
        let cfg = NetworkConfig::new(8, vec![10, 5]);
        let p = random_params(&cfg, 5);
        let x = random_matrix(100, 8, 6);
        let batch = forward_batch(&cfg, &p, &x).unwrap();
        let worst = (0..100)
            .map(|r| (batch[r] - forward(&cfg, &p, x.row(r)).unwrap()).abs())
            .fold(0.0, f64::max);
        assert_eq!(worst, 0.0);

        let single = forward_batch(&cfg, &p, &x.select_rows(&[17])).unwrap();
        assert_eq!(single[0], forward(&cfg, &p, x.row(17)).unwrap());

        let perm: Vec<usize> = (0..100).rev().collect();
        let permuted = forward_batch(&cfg, &p, &x.select_rows(&perm)).unwrap();
        for (i, &r) in perm.iter().enumerate() {
            assert_eq!(permuted[i], batch[r]);
        }
    }

    #[test]
    fn zero_upstream_gives_zero_gradient() {
        let cfg = NetworkConfig::new(4, vec![3]);
        let p = random_params(&cfg, 9);
        let x = random_matrix(10, 4, 10);
        let g = backprop(&cfg, &p, &x, &[0.0; 10]).unwrap();
        assert!(g.0.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_gradient_matches_least_squares_closed_form() {
        let cfg = NetworkConfig::new(3, vec![]);
        let p = random_params(&cfg, 12);
        let x = random_matrix(30, 3, 13);
        let y: Vec<f64> = (0..30).map(|i| (i as f64).sin()).collect();
        let pred = forward_batch(&cfg, &p, &x).unwrap();
        let n = 30.0;
        let upstream: Vec<f64> = pred.iter().zip(&y).map(|(p, y)| 2.0 / n * (p - y)).collect();
        let g = backprop(&cfg, &p, &x, &upstream).unwrap();
        for j in 0..3 {
            let expect: f64 = (0..30).map(|r| 2.0 / n * x.get(r, j) * (pred[r] - y[r])).sum();
            assert!((g.0.weights[0].get(0, j) - expect).abs() < 1e-12);
        }
        let expect_b: f64 = (0..30).map(|r| 2.0 / n * (pred[r] - y[r])).sum();
        assert!((g.0.biases[0][0] - expect_b).abs() < 1e-12);
    }

    #[test]
    fn backprop_rejects_bad_upstream() {
        let cfg = NetworkConfig::new(2, vec![2]);
        let p = NetworkParams::zeros(&cfg);
        let x = Matrix::zeros(3, 2);
        assert!(backprop(&cfg, &p, &x, &[0.0; 2]).is_err());
        assert!(matches!(
            backprop(&cfg, &p, &x, &[0.0, f64::NAN, 0.0]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn prune_identity_and_shapes() {
        let cfg = NetworkConfig::new(20, vec![10, 5]);
        let p = init_params(&cfg, 1);
        let all: Vec<usize> = (0..20).collect();
        let (same, same_cfg, map) = prune_inputs(&cfg, &p, &all).unwrap();
        assert_eq!(same, p);
        assert_eq!(same_cfg, cfg);
        assert_eq!(map, all);

        let (small, small_cfg, map) = prune_inputs(&cfg, &p, &[3, 0, 17, 9]).unwrap();
        assert_eq!((small.weights[0].rows(), small.weights[0].cols()), (10, 4));
        assert_eq!(small_cfg.input_dim, 4);
        assert_eq!(map, vec![0, 3, 9, 17]);

        assert!(matches!(
            prune_inputs(&cfg, &p, &[20]),
            Err(Error::IndexOutOfRange { index: 20, dim: 20 })
        ));
    }

    #[test]
    fn prune_zero_columns_preserves_output_exactly() {
        let cfg = NetworkConfig::new(6, vec![4, 3]);
        let mut p = random_params(&cfg, 21);
        for j in [1, 4] {
            p.weights[0].set_column(j, &[0.0; 4]);
        }
        let keep = [0, 2, 3, 5];
        let (small, small_cfg, _) = prune_inputs(&cfg, &p, &keep).unwrap();
        let x = random_matrix(15, 6, 22);
        let full = forward_batch(&cfg, &p, &x).unwrap();
        let reduced = forward_batch(&small_cfg, &small, &x.select_columns(&keep)).unwrap();
        assert_eq!(full, reduced);

        let back = embed_inputs(&small, &keep, 6).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn prune_to_nothing_is_constant() {
        let cfg = NetworkConfig::new(3, vec![2]);
        let mut p = random_params(&cfg, 30);
        for j in 0..3 {
            p.weights[0].set_column(j, &[0.0; 2]);
        }
        let (empty, empty_cfg, map) = prune_inputs(&cfg, &p, &[]).unwrap();
        assert!(map.is_empty());
        let out = forward(&empty_cfg, &empty, &[]).unwrap();
        assert_eq!(out, forward(&cfg, &p, &[1.0, 2.0, 3.0]).unwrap());
    }
}
