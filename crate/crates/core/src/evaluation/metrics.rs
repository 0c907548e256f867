use crate::error::{Error, Result};
use crate::retrieval::RankedList;
use crate::stats::average_ranks;

use super::DocumentJudgments;

/// Area under the ROC curve via the Mann–Whitney statistic; tied
/// positive–negative pairs count one half.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            actual: scores.len(),
        });
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    let ranks = average_ranks(scores);
    let rank_sum: f64 = ranks.iter().zip(labels).filter(|(_, &l)| l).map(|(r, _)| r).sum();
    let (p, n) = (n_pos as f64, n_neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

/// `tp / (tp + fp)`; `None` when nothing was predicted positive.
pub fn precision(predicted: &[bool], labels: &[bool]) -> Option<f64> {
    let (tp, fp) = confusion(predicted, labels);
    (tp + fp > 0).then(|| tp as f64 / (tp + fp) as f64)
}

fn confusion(predicted: &[bool], labels: &[bool]) -> (usize, usize) {
    predicted.iter().zip(labels).fold((0, 0), |(tp, fp), (&p, &l)| match (p, l) {
        (true, true) => (tp + 1, fp),
        (true, false) => (tp, fp + 1),
        _ => (tp, fp),
    })
}

/// Precision with each hit weighted by the tf-idf of its word:
/// `(w_tp·tp) / (w_tp·tp + w_fp·fp)`, where `w_tp` and `w_fp` are the
/// summed weights of the true- and false-positive words. `None` when the
/// denominator is zero.
pub fn weighted_precision(predicted: &[bool], labels: &[bool], weights: &[f64]) -> Option<f64> {
    let (tp, fp) = confusion(predicted, labels);
    let (mut w_tp, mut w_fp) = (0.0, 0.0);
    for ((&p, &l), &w) in predicted.iter().zip(labels).zip(weights) {
        if p {
            if l {
                w_tp += w;
            } else {
                w_fp += w;
            }
        }
    }
    let num = w_tp * tp as f64;
    let den = num + w_fp * fp as f64;
    (den > 0.0).then(|| num / den)
}

/// Sum of the first `k` relevance grades.
pub fn gain_at(grades: &[u8], k: usize) -> f64 {
    grades.iter().take(k).map(|&g| f64::from(g)).sum()
}

/// Cumulative gain of the top `k` ranked documents; unjudged documents
/// count 0.
pub fn cumulative_gain(ranked: &RankedList, judgments: &DocumentJudgments, k: usize) -> f64 {
    let grades: Vec<u8> = ranked.doc_ids().map(|d| judgments.score(d)).collect();
    gain_at(&grades, k)
}

/// Add-one permutation p-value: `(#{null ≥ observed} + 1) / (k + 1)`.
pub fn permutation_p_value(observed: f64, null: &[f64]) -> f64 {
    let hits = null.iter().filter(|&&v| v >= observed).count();
    (hits + 1) as f64 / (null.len() + 1) as f64
}
