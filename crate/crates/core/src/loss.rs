//! Empirical losses and their derivatives with respect to the network output.
//!
//! Every loss carries the `1/n` factor, so the returned `upstream` vector is
//! the exact gradient of the loss value with respect to each prediction.

use crate::dataset::Outcome;
use crate::{Error, Result};

/// Loss value together with `d loss / d prediction_i` for every row.
#[derive(Debug, Clone, PartialEq)]
pub struct LossEval {
    pub value: f64,
    pub upstream: Vec<f64>,
}

/// Mean squared error `(1/n) sum (y - pred)^2`.
pub fn mse_loss(pred: &[f64], y: &[f64]) -> Result<LossEval> {
    check_lengths(pred.len(), y.len())?;
    let n = pred.len() as f64;
    let mut value = 0.0;
    let upstream = pred
        .iter()
        .zip(y)
        .map(|(&p, &t)| {
            let r = p - t;
            value += r * r;
            2.0 * r / n
        })
        .collect();
    Ok(LossEval {
        value: value / n,
        upstream,
    })
}

/// Binary cross-entropy on logits, evaluated as `softplus(s) - y s`.
pub fn bce_loss(score: &[f64], y: &[f64]) -> Result<LossEval> {
    check_lengths(score.len(), y.len())?;
    if let Some(i) = y.iter().position(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::InvalidData(format!("label {} at row {i} is not 0 or 1", y[i])));
    }
    let n = score.len() as f64;
    let mut value = 0.0;
    let upstream = score
        .iter()
        .zip(y)
        .map(|(&s, &t)| {
            value += softplus(s) - t * s;
            (sigmoid(s) - t) / n
        })
        .collect();
    Ok(LossEval {
        value: value / n,
        upstream,
    })
}

/// Negative log partial likelihood with Breslow handling of tied times.
///
/// The risk set of row `i` is every row with `time_j >= time_i`. Risk-set sums
/// are accumulated in log space in one pass over rows sorted by decreasing
/// time, so the cost is dominated by the sort.
pub fn cox_loss(score: &[f64], time: &[f64], event: &[bool]) -> Result<LossEval> {
    let n = score.len();
    check_lengths(n, time.len())?;
    check_lengths(n, event.len())?;
    if !event.iter().any(|&e| e) {
        return Err(Error::NoEvents);
    }
    if let Some(i) = time.iter().position(|&t| !(t > 0.0)) {
        return Err(Error::InvalidData(format!("survival time {} at row {i} is not positive", time[i])));
    }
    if let Some(i) = score.iter().position(|s| !s.is_finite()) {
        return Err(Error::NonFinite(format!("risk score at row {i}")));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| time[b].total_cmp(&time[a]));

    // log of the risk-set sum for each row, shared across ties.
    let mut log_risk = vec![0.0; n];
    let mut acc = f64::NEG_INFINITY;
    let mut start = 0;
    while start < n {
        let t = time[order[start]];
        let mut end = start;
        while end < n && time[order[end]] == t {
            acc = log_add_exp(acc, score[order[end]]);
            end += 1;
        }
        for &i in &order[start..end] {
            log_risk[i] = acc;
        }
        start = end;
    }

    let nf = n as f64;
    let mut value = 0.0;
    for i in 0..n {
        if event[i] {
            value -= score[i] - log_risk[i];
        }
    }

    // d/ds_k = (1/n) [exp(s_k) * sum_{i event, time_i <= time_k} 1/R_i - event_k],
    // with the inner sum carried in log space.
    let mut upstream = vec![0.0; n];
    let mut log_inv = f64::NEG_INFINITY;
    let mut end = n;
    while end > 0 {
        let t = time[order[end - 1]];
        let mut begin = end;
        while begin > 0 && time[order[begin - 1]] == t {
            let i = order[begin - 1];
            if event[i] {
                log_inv = log_add_exp(log_inv, -log_risk[i]);
            }
            begin -= 1;
        }
        for &k in &order[begin..end] {
            let d = if event[k] { 1.0 } else { 0.0 };
            upstream[k] = ((score[k] + log_inv).exp() - d) / nf;
        }
        end = begin;
    }

    Ok(LossEval {
        value: value / nf,
        upstream,
    })
}

/// Dispatches on the outcome type.
pub fn evaluate(pred: &[f64], outcome: &Outcome) -> Result<LossEval> {
    match outcome {
        Outcome::Continuous(y) => mse_loss(pred, y),
        Outcome::Binary(y) => bce_loss(pred, y),
        Outcome::Survival { time, event } => cox_loss(pred, time, event),
    }
}

#[inline]
pub(crate) fn sigmoid(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

#[inline]
fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

/// `log(1 + exp(s))` without overflow.
#[inline]
fn softplus(s: f64) -> f64 {
    s.max(0.0) + (-s.abs()).exp().ln_1p()
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a == 0 {
        return Err(Error::InvalidData("empty input".into()));
    }
    if a != b {
        return Err(Error::Dimension(format!("lengths differ: {a} vs {b}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mse_examples() {
        let e = mse_loss(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.upstream, vec![0.0, 0.0]);
        assert_eq!(mse_loss(&[0.0, 0.0], &[1.0, -1.0]).unwrap().value, 1.0);
        assert!(mse_loss(&[], &[]).is_err());
        assert!(mse_loss(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn bce_examples() {
        let e = bce_loss(&[0.0], &[1.0]).unwrap();
        assert!((e.value - std::f64::consts::LN_2).abs() < 1e-15);
        let e = bce_loss(&[40.0], &[1.0]).unwrap();
        assert!(e.value >= 0.0 && e.value < 1e-15);
        for s in [-1e3, -700.0, 700.0, 1e3] {
            for y in [0.0, 1.0] {
                let e = bce_loss(&[s], &[y]).unwrap();
                assert!(e.value.is_finite() && e.upstream[0].is_finite());
            }
        }
        assert!((bce_loss(&[-1e3], &[1.0]).unwrap().value - 1e3).abs() < 1e-9);
        assert!(bce_loss(&[0.0], &[0.5]).is_err());
    }

    #[test]
    fn cox_single_event_is_zero() {
        let e = cox_loss(&[0.7], &[2.0], &[true]).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.upstream, vec![0.0]);
    }

    #[test]
    fn cox_equal_scores_give_log_risk_set_sizes() {
        let n = 6;
        let time: Vec<f64> = (1..=n).map(|t| t as f64).collect();
        let event = vec![true; n];
        let expected: f64 = (1..=n).map(|k| (k as f64).ln()).sum::<f64>() / n as f64;
        for c in [-3.0, 0.0, 12.5] {
            let e = cox_loss(&vec![c; n], &time, &event).unwrap();
            assert!((e.value - expected).abs() < 1e-12);
            assert!(e.upstream.iter().sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn cox_requires_an_event() {
        assert!(matches!(
            cox_loss(&[0.0, 1.0], &[1.0, 2.0], &[false, false]),
            Err(Error::NoEvents)
        ));
        assert!(cox_loss(&[0.0], &[-1.0], &[true]).is_err());
    }

    #[test]
    fn cox_large_scores_stay_finite() {
        let e = cox_loss(&[800.0, -800.0, 5.0], &[1.0, 2.0, 3.0], &[true, true, false]).unwrap();
        assert!(e.value.is_finite());
        assert!(e.upstream.iter().all(|v| v.is_finite()));
    }
}
