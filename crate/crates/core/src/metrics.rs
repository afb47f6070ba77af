//! Accuracy, ROC AUC and wall-clock timing.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataset::{Label, POSITIVE};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub auc: Option<f64>,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub wall_time_seconds: f64,
}

pub fn accuracy(labels: &[Label], predictions: &[Label]) -> Result<f64> {
    if labels.len() != predictions.len() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: predictions.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::Empty("labels"));
    }
    let hits = labels
        .iter()
        .zip(predictions)
        .filter(|(a, b)| a == b)
        .count();
    Ok(hits as f64 / labels.len() as f64)
}

/// Area under the ROC curve as the Mann–Whitney statistic: the probability
/// that a random positive scores above a random negative, ties counting
/// one half. Sort-based, `O(n log n)`.
pub fn roc_auc(labels: &[Label], scores: &[f64]) -> Result<f64> {
    if labels.len() != scores.len() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: scores.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::NonFinite("scores"));
    }
    let n_pos = labels.iter().filter(|&&y| y == POSITIVE).count() as u64;
    let n_neg = labels.len() as u64 - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass {
            positives: n_pos as usize,
            negatives: n_neg as usize,
        });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Twice the U statistic, kept in integers so ties stay exact.
    let mut twice_u: u128 = 0;
    let mut neg_below: u64 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        let (mut pos_here, mut neg_here) = (0u64, 0u64);
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            if labels[order[end]] == POSITIVE {
                pos_here += 1;
            } else {
                neg_here += 1;
            }
            end += 1;
        }
        twice_u += 2 * pos_here as u128 * neg_below as u128 + pos_here as u128 * neg_here as u128;
        neg_below += neg_here;
        start = end;
    }
    Ok(twice_u as f64 / (2.0 * n_pos as f64 * n_neg as f64))
}

/// Run `op` and return its result with the elapsed monotonic time in seconds.
pub fn time_block<T>(op: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = op();
    (out, start.elapsed().as_secs_f64())
}

/// Confusion counts, accuracy and (when both classes are present) AUC.
pub fn evaluate(
    labels: &[Label],
    scores: &[f64],
    threshold: f64,
    wall_time_seconds: f64,
) -> Result<EvalReport> {
    if labels.len() != scores.len() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: scores.len(),
        });
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for (&y, &s) in labels.iter().zip(scores) {
        match (y == POSITIVE, s >= threshold) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (false, false) => tn += 1,
            (true, false) => fn_ += 1,
        }
    }
    let n = labels.len();
    if n == 0 {
        return Err(Error::Empty("labels"));
    }
    let auc = match roc_auc(labels, scores) {
        Ok(a) => Some(a),
        Err(Error::SingleClass { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(EvalReport {
        accuracy: (tp + tn) as f64 / n as f64,
        auc,
        tp,
        fp,
        tn,
        fn_,
        wall_time_seconds,
    })
}
