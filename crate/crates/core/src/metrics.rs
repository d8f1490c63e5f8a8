//! Selection and prediction metrics.

use serde::{Deserialize, Serialize};

use crate::dataset::Outcome;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoreKind {
    R2,
    Accuracy,
    CIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionMetrics {
    pub model_size: usize,
    pub fpr_pct: f64,
    pub fnr_pct: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub model_size: usize,
    pub fpr_pct: f64,
    pub fnr_pct: f64,
    pub score: f64,
    pub score_kind: ScoreKind,
}

/// Model size and false positive/negative percentages of `selected`
/// against the true support, both as 0-based indices below `d`.
pub fn selection_metrics(selected: &[usize], truth: &[usize], d: usize) -> Result<SelectionMetrics> {
    if truth.is_empty() {
        return Err(Error::InvalidData("true support is empty; FNR is undefined".into()));
    }
    if let Some(&j) = selected.iter().chain(truth).find(|&&j| j >= d) {
        return Err(Error::IndexOutOfRange { index: j, dim: d });
    }
    let in_truth = |j: &usize| truth.contains(j);
    let false_pos = selected.iter().filter(|j| !in_truth(j)).count();
    let missed = truth.iter().filter(|j| !selected.contains(j)).count();
    let null_count = d - truth.len();
    let fpr_pct = if null_count == 0 {
        0.0
    } else {
        false_pos as f64 / null_count as f64 * 100.0
    };
    Ok(SelectionMetrics {
        model_size: selected.len(),
        fpr_pct,
        fnr_pct: missed as f64 / truth.len() as f64 * 100.0,
    })
}

pub fn r2_score(pred: &[f64], y: &[f64]) -> Result<f64> {
    if pred.len() != y.len() {
        return Err(Error::Dimension(format!("{} predictions for {} responses", pred.len(), y.len())));
    }
    if y.len() < 2 {
        return Err(Error::InvalidData("R^2 needs at least two observations".into()));
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(Error::InvalidData("response has zero variance".into()));
    }
    let ss_res: f64 = pred.iter().zip(y).map(|(p, v)| (v - p).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Fraction of rows where `score > 0` agrees with the label.
pub fn accuracy(score: &[f64], y: &[f64]) -> Result<f64> {
    if score.len() != y.len() || score.is_empty() {
        return Err(Error::Dimension(format!("{} scores for {} labels", score.len(), y.len())));
    }
    let hits = score
        .iter()
        .zip(y)
        .filter(|(&s, &l)| (s > 0.0) == (l == 1.0))
        .count();
    Ok(hits as f64 / y.len() as f64)
}

/// Harrell's concordance index. Higher score means higher risk.
///
/// A pair `(i, j)` is comparable when `i` had an event and `time_i < time_j`;
/// it counts 1 when `score_i > score_j` and 0.5 on a score tie. Counting runs
/// over rows in decreasing time with a Fenwick tree on score ranks.
pub fn c_index(score: &[f64], time: &[f64], event: &[bool]) -> Result<f64> {
    let n = score.len();
    if time.len() != n || event.len() != n {
        return Err(Error::Dimension("score, time and event lengths differ".into()));
    }
    if let Some(i) = score.iter().position(|s| s.is_nan()) {
        return Err(Error::NonFinite(format!("risk score at row {i}")));
    }
    // Adding 0.0 folds -0.0 into 0.0 so equal scores share one rank.
    let score: Vec<f64> = score.iter().map(|s| s + 0.0).collect();
    let mut sorted = score.clone();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let rank = |s: f64| sorted.binary_search_by(|v| v.total_cmp(&s)).expect("score present") + 1;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| time[b].total_cmp(&time[a]));

    let mut tree = Fenwick::new(sorted.len());
    let (mut concordant, mut tied, mut comparable) = (0u64, 0u64, 0u64);
    let mut inserted = 0u64;
    let mut start = 0;
    while start < n {
        let t = time[order[start]];
        let mut end = start;
        while end < n && time[order[end]] == t {
            end += 1;
        }
        for &i in &order[start..end] {
            if event[i] {
                let r = rank(score[i]);
                let below = tree.prefix(r - 1);
                concordant += below;
                tied += tree.prefix(r) - below;
                comparable += inserted;
            }
        }
        for &i in &order[start..end] {
            tree.add(rank(score[i]));
            inserted += 1;
        }
        start = end;
    }
    if comparable == 0 {
        return Err(Error::NoComparablePairs);
    }
    Ok(concordance_ratio(concordant, tied, comparable))
}

/// `(concordant + tied / 2) / comparable`.
pub fn concordance_ratio(concordant: u64, tied: u64, comparable: u64) -> f64 {
    (2 * concordant + tied) as f64 / (2 * comparable) as f64
}

/// Prediction score appropriate to the outcome type.
pub fn prediction_score(pred: &[f64], outcome: &Outcome) -> Result<(f64, ScoreKind)> {
    match outcome {
        Outcome::Continuous(y) => Ok((r2_score(pred, y)?, ScoreKind::R2)),
        Outcome::Binary(y) => Ok((accuracy(pred, y)?, ScoreKind::Accuracy)),
        Outcome::Survival { time, event } => Ok((c_index(pred, time, event)?, ScoreKind::CIndex)),
    }
}

struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self { tree: vec![0; n + 1] }
    }

    fn add(&mut self, mut i: usize) {
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Count at ranks `1..=i`.
    fn prefix(&self, mut i: usize) -> u64 {
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_examples() {
        let s = [0, 1, 2, 3];
        let m = selection_metrics(&s, &s, 20).unwrap();
        assert_eq!((m.model_size, m.fpr_pct, m.fnr_pct), (4, 0.0, 0.0));
        let m = selection_metrics(&[0, 1, 2, 4], &s, 20).unwrap();
        assert_eq!((m.model_size, m.fpr_pct, m.fnr_pct), (4, 6.25, 25.0));
        let m = selection_metrics(&[], &s, 20).unwrap();
        assert_eq!((m.model_size, m.fpr_pct, m.fnr_pct), (0, 0.0, 100.0));
        assert!(selection_metrics(&[0], &[], 20).is_err());
        assert!(selection_metrics(&[25], &s, 20).is_err());
    }

    #[test]
    fn r2_examples() {
        let y = [1.0, 2.0, 4.0, -1.0];
        assert_eq!(r2_score(&y, &y).unwrap(), 1.0);
        let mean = [1.5; 4];
        assert_eq!(r2_score(&mean, &y).unwrap(), 0.0);
        assert!(r2_score(&[1.0, 1.0], &[2.0, 2.0]).is_err());
        assert!(r2_score(&[1.0], &[2.0]).is_err());
    }

    #[test]
    fn r2_translation_invariant() {
        let y = [0.3, -1.2, 2.2, 0.9, 4.1];
        let p = [0.1, -0.7, 1.9, 1.3, 3.0];
        let base = r2_score(&p, &y).unwrap();
        let shift = |v: &[f64]| v.iter().map(|a| a + 17.5).collect::<Vec<_>>();
        assert!((r2_score(&shift(&p), &shift(&y)).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn accuracy_examples() {
        let y = [1.0, 0.0, 1.0, 0.0];
        assert_eq!(accuracy(&[2.0, -1.0, 0.5, -0.1], &y).unwrap(), 1.0);
        assert_eq!(accuracy(&[-2.0, 1.0, -0.5, 0.1], &y).unwrap(), 0.0);
    }

    #[test]
    fn c_index_examples() {
        let time = [1.0, 2.0, 3.0, 4.0];
        let event = [true; 4];
        let perfect: Vec<f64> = time.iter().map(|t| -t).collect();
        assert_eq!(c_index(&perfect, &time, &event).unwrap(), 1.0);
        assert_eq!(c_index(&[0.3; 4], &time, &event).unwrap(), 0.5);
        assert_eq!(c_index(&time, &time, &event).unwrap(), 0.0);
        assert!(matches!(
            c_index(&[1.0, 2.0], &[1.0, 2.0], &[false, false]),
            Err(Error::NoComparablePairs)
        ));
    }

    #[test]
    fn tied_times_are_not_comparable() {
        // Both rows die at t=1: no pair qualifies.
        assert!(c_index(&[1.0, 0.0], &[1.0, 1.0], &[true, true]).is_err());
    }

    #[test]
    fn signed_zero_scores_tie() {
        let c = c_index(&[-0.0, 0.0, 1.0], &[1.0, 2.0, 3.0], &[true, true, true]).unwrap();
        // One tied pair out of three comparable pairs.
        assert_eq!(c, 0.5 / 3.0);
        assert!(c_index(&[f64::NAN, 0.0], &[1.0, 2.0], &[true, true]).is_err());
    }
}
