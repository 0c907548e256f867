//! LinRel intent modeling: turn per-term relevance feedback into an
//! upper-confidence score for every vocabulary term.
//!
//! With `K_t` the tf-idf rows of the terms that received feedback and `s`
//! their scores, each candidate term `i` with row `k_i` gets
//!
//! ```text
//! a_i = k_i · K_tᵀ (K_t K_tᵀ + λ I)⁻¹       (= k_i (K_tᵀK_t + λI)⁻¹ K_tᵀ)
//! w_i = a_i · s + (c/2) ‖a_i‖
//! ```
//!
//! The left form needs only an `f × f` solve (`f` = number of feedback
//! terms), so its cost does not grow with the number of documents.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::classifier::binarize;
use crate::corpus::{term_of, SparseMatrix, TermDocumentMatrix};
use crate::eeg::Label;
use crate::error::{Error, Result};

pub const DEFAULT_LAMBDA: f64 = 0.5;
pub const DEFAULT_EXPLORATION: f64 = 2.0;
pub const DEFAULT_QUERY_TERMS: usize = 10;

/// Per-term relevance scores, at most one entry per term, sorted by term
/// index.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Feedback {
    entries: Vec<(usize, f64)>,
}

impl Feedback {
    pub fn new(entries: impl IntoIterator<Item = (usize, f64)>, n_terms: usize) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, r) in entries {
            if i >= n_terms {
                return Err(Error::InvalidFeedback(format!("term index {i} outside vocabulary of {n_terms}")));
            }
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::InvalidFeedback(format!("score {r} for term {i} outside [0, 1]")));
            }
            if map.insert(i, r).is_some() {
                return Err(Error::InvalidFeedback(format!("duplicate entry for term {i}")));
            }
        }
        Ok(Self {
            entries: map.into_iter().collect(),
        })
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Max-aggregate predictions per indexed term, keeping those `accept` admits.
fn aggregate(
    predictions: &[(String, f64)],
    index: &TermDocumentMatrix,
    accept: impl Fn(f64) -> bool,
) -> Feedback {
    let mut best: BTreeMap<usize, f64> = BTreeMap::new();
    for (word, p) in predictions {
        if !accept(*p) {
            continue;
        }
        let Some(term) = term_of(word) else { continue };
        match index.term_id(&term) {
            Some(i) => {
                let e = best.entry(i).or_insert(*p);
                *e = e.max(*p);
            }
            None => log::warn!("feedback word {word:?} (term {term:?}) not in the index; dropped"),
        }
    }
    Feedback {
        entries: best.into_iter().map(|(i, p)| (i, p.clamp(0.0, 1.0))).collect(),
    }
}

/// Terms predicted relevant (`p > 0.5`), scored by their highest probability.
pub fn assemble_feedback(predictions: &[(String, f64)], index: &TermDocumentMatrix) -> Feedback {
    aggregate(predictions, index, |p| binarize(p) == Label::Relevant)
}

/// Every read term with its raw (highest) probability; used when no word
/// crosses the threshold.
pub fn fallback_feedback(predictions: &[(String, f64)], index: &TermDocumentMatrix) -> Feedback {
    aggregate(predictions, index, |_| true)
}

/// Thresholded feedback, or the fallback when it is empty. The flag reports
/// whether the fallback was used.
pub fn feedback_or_fallback(predictions: &[(String, f64)], index: &TermDocumentMatrix) -> (Feedback, bool) {
    let fb = assemble_feedback(predictions, index);
    if fb.is_empty() {
        (fallback_feedback(predictions, index), true)
    } else {
        (fb, false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinRelParams {
    pub lambda: f64,
    pub c: f64,
}

impl Default for LinRelParams {
    fn default() -> Self {
        Self {
            lambda: DEFAULT_LAMBDA,
            c: DEFAULT_EXPLORATION,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntentModel {
    terms: Vec<String>,
    /// `w_i` for every vocabulary term.
    pub weights: Vec<f64>,
    pub params: LinRelParams,
}

/// A term with a non-negative query weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedTerm {
    pub term: String,
    pub weight: f64,
}

impl IntentModel {
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// One `term<TAB>weight` line per vocabulary term, in vocabulary order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (t, w) in self.terms.iter().zip(&self.weights) {
            let _ = writeln!(out, "{t}\t{w}");
        }
        out
    }
}

/// LinRel scores for every row of `k` given feedback rows and scores.
pub fn linrel_weights(k: &SparseMatrix, feedback: &[(usize, f64)], params: LinRelParams) -> Result<Vec<f64>> {
    if feedback.is_empty() {
        return Err(Error::NoPositiveTerms);
    }
    if !(params.lambda > 0.0) {
        return Err(Error::Config(format!("LinRel lambda must be positive, got {}", params.lambda)));
    }
    let f = feedback.len();
    let n = k.n_rows();

    // Feedback rows inverted by document: doc -> [(feedback slot, weight)].
    let mut by_doc: Vec<Vec<(usize, f64)>> = vec![Vec::new(); k.n_cols()];
    for (t, &(row, _)) in feedback.iter().enumerate() {
        if row >= n {
            return Err(Error::InvalidFeedback(format!("term index {row} outside vocabulary of {n}")));
        }
        for &(doc, v) in k.row(row) {
            by_doc[doc].push((t, v));
        }
    }

    // B = K_t Kᵀ (f × n) and G = K_t K_tᵀ + λI.
    let mut b = DMatrix::<f64>::zeros(f, n);
    for i in 0..n {
        for &(doc, v) in k.row(i) {
            for &(t, u) in &by_doc[doc] {
                b[(t, i)] += u * v;
            }
        }
    }
    let mut g = DMatrix::<f64>::from_fn(f, f, |s, t| b[(s, feedback[t].0)]);
    for d in 0..f {
        g[(d, d)] += params.lambda;
    }
    let chol = Cholesky::new(g).ok_or(Error::NotPositiveDefinite)?;
    // Column i of A is a_i.
    let a = chol.solve(&b);
    let s = DVector::from_iterator(f, feedback.iter().map(|&(_, r)| r));
    Ok((0..n)
        .map(|i| {
            let ai = a.column(i);
            ai.dot(&s) + 0.5 * params.c * ai.norm()
        })
        .collect())
}

pub fn linrel_score(feedback: &Feedback, index: &TermDocumentMatrix, params: LinRelParams) -> Result<IntentModel> {
    let weights = linrel_weights(index.weights(), feedback.entries(), params)?;
    Ok(IntentModel {
        terms: index.vocabulary().to_vec(),
        weights,
        params,
    })
}

/// Top `m_terms` positive-weight terms, highest first, ties by term.
pub fn select_query(model: &IntentModel, m_terms: usize) -> Result<Vec<WeightedTerm>> {
    select_top(model.terms(), &model.weights, m_terms)
}

pub fn select_top(terms: &[String], weights: &[f64], m_terms: usize) -> Result<Vec<WeightedTerm>> {
    let mut positive: Vec<(usize, f64)> = weights
        .iter()
        .enumerate()
        .filter(|(_, w)| **w > 0.0)
        .map(|(i, w)| (i, *w))
        .collect();
    if positive.is_empty() {
        return Err(Error::NoPositiveWeights);
    }
    positive.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| terms[a.0].cmp(&terms[b.0])));
    positive.truncate(m_terms);
    Ok(positive
        .into_iter()
        .map(|(i, w)| WeightedTerm {
            term: terms[i].clone(),
            weight: w,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;

    fn doc(id: &str, text: &str) -> Document {
        Document {
            id: id.into(),
            title: id.into(),
            text: text.into(),
        }
    }

    fn predictions(pairs: &[(&str, f64)]) -> Vec<(String, f64)> {
        pairs.iter().map(|(w, p)| (w.to_string(), *p)).collect()
    }

    fn index() -> TermDocumentMatrix {
        TermDocumentMatrix::build(&[doc("d1", "atom nucleus matter"), doc("d2", "money bank matter market")]).unwrap()
    }

    #[test]
    fn feedback_drops_stop_words_and_aggregates_by_max() {
        let idx = index();
        let fb = assemble_feedback(&predictions(&[("matter", 0.9), ("the", 0.8)]), &idx);
        assert_eq!(fb.entries(), &[(idx.term_id("matter").unwrap(), 0.9)]);
        let fb = assemble_feedback(&predictions(&[("atomic", 0.7), ("atoms", 0.6)]), &idx);
        assert_eq!(fb.entries(), &[(idx.term_id("atom").unwrap(), 0.7)]);
        let fb = assemble_feedback(&predictions(&[("atom", 0.5), ("bank", 0.2)]), &idx);
        assert!(fb.is_empty());
    }

    #[test]
    fn fallback_uses_all_read_terms() {
        let idx = index();
        let preds = predictions(&[("atom", 0.5), ("bank", 0.2), ("banks", 0.3)]);
        let (fb, used) = feedback_or_fallback(&preds, &idx);
        assert!(used);
        assert_eq!(fb.len(), 2);
        assert!(fb.entries().contains(&(idx.term_id("bank").unwrap(), 0.3)));
    }

    #[test]
    fn single_term_hand_values() {
        // Rows: e1, e2.
        let k = SparseMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let w = linrel_weights(&k, &[(0, 1.0)], LinRelParams::default()).unwrap();
        assert!((w[0] - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(w[1], 0.0);
    }

    #[test]
    fn empty_feedback_and_bad_lambda() {
        let k = SparseMatrix::from_dense(&[vec![1.0]]);
        assert!(matches!(linrel_weights(&k, &[], LinRelParams::default()), Err(Error::NoPositiveTerms)));
        let p = LinRelParams { lambda: 0.0, c: 2.0 };
        assert!(linrel_weights(&k, &[(0, 1.0)], p).is_err());
    }

    #[test]
    fn feedback_validation() {
        assert!(Feedback::new([(0, 1.2)], 3).is_err());
        assert!(Feedback::new([(5, 0.2)], 3).is_err());
        assert!(Feedback::new([(1, 0.2), (1, 0.3)], 3).is_err());
        assert_eq!(Feedback::new([(2, 0.2), (0, 0.3)], 3).unwrap().entries(), &[(0, 0.3), (2, 0.2)]);
    }

    #[test]
    fn select_query_orders_and_filters() {
        let terms: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let q = select_top(&terms, &[0.4, -0.1, 0.9], 2).unwrap();
        assert_eq!(q, vec![WeightedTerm { term: "c".into(), weight: 0.9 }, WeightedTerm { term: "a".into(), weight: 0.4 }]);
        assert_eq!(select_top(&terms, &[0.4, -0.1, 0.9], 10).unwrap().len(), 2);
        assert!(matches!(select_top(&terms, &[0.0, -1.0, 0.0], 2), Err(Error::NoPositiveWeights)));
        let tied = select_top(&terms, &[0.5, 0.5, 0.5], 2).unwrap();
        assert_eq!(tied[0].term, "a");
        assert_eq!(tied[1].term, "b");
    }

    #[test]
    fn dump_lists_every_term() {
        let idx = index();
        let fb = assemble_feedback(&predictions(&[("atom", 0.9)]), &idx);
        let model = linrel_score(&fb, &idx, LinRelParams::default()).unwrap();
        let dump = model.dump();
        assert_eq!(dump.lines().count(), idx.n_terms());
        assert!(dump.starts_with("atom\t"));
    }
}
