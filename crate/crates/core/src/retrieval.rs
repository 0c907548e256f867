//! Query-likelihood retrieval with Dirichlet-smoothed unigram document
//! models, scored in log space:
//!
//! ```text
//! p(k | d) = (c(k|d) + µ p(k|C)) / (|d| + µ)
//! score(d) = Σ_i w_i ln p(k_i | d)
//! ```

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::TermDocumentMatrix;
use crate::error::{Error, Result};
use crate::intent::WeightedTerm;

pub const DEFAULT_MU: f64 = 2000.0;
pub const DEFAULT_DEPTH: usize = 30;

pub fn smoothed_prob(term: usize, doc: usize, index: &TermDocumentMatrix, mu: f64) -> f64 {
    let c = index.count(term, doc) as f64;
    (c + mu * index.collection_prob(term)) / (index.doc_length(doc) as f64 + mu)
}

/// Smoothed probability by term string and document id; unknown terms
/// have probability 0.
pub fn smoothed_prob_of(term: &str, doc_id: &str, index: &TermDocumentMatrix, mu: f64) -> Result<f64> {
    let doc = index.doc_index(doc_id)?;
    Ok(index.term_id(term).map_or(0.0, |t| smoothed_prob(t, doc, index, mu)))
}

/// Query terms resolved against the vocabulary. Terms outside it are
/// dropped with a warning: their probability is 0 in every document, so
/// they carry no ranking information.
fn resolve(query: &[WeightedTerm], index: &TermDocumentMatrix) -> Vec<(usize, f64)> {
    query
        .iter()
        .filter(|q| q.weight != 0.0)
        .filter_map(|q| match index.term_id(&q.term) {
            Some(t) => Some((t, q.weight)),
            None => {
                log::warn!("query term {:?} not in the index; ignored", q.term);
                None
            }
        })
        .collect()
}

fn score_resolved(query: &[(usize, f64)], doc: usize, index: &TermDocumentMatrix, mu: f64) -> f64 {
    query.iter().map(|&(t, w)| w * smoothed_prob(t, doc, index, mu).ln()).sum()
}

pub fn score_document(query: &[WeightedTerm], doc: usize, index: &TermDocumentMatrix, mu: f64) -> f64 {
    score_resolved(&resolve(query, index), doc, index, mu)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub rank: usize,
    pub doc_id: String,
    pub title: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub k: usize,
    pub entries: Vec<RankedEntry>,
}

impl RankedList {
    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.doc_id.as_str())
    }

    /// One JSON object per line: rank, doc_id, title, score.
    pub fn write_jsonl<W: Write>(&self, w: &mut W) -> Result<()> {
        for e in &self.entries {
            serde_json::to_writer(&mut *w, e)?;
            w.write_all(b"\n").map_err(|e| Error::io("<ranked list>", e))?;
        }
        Ok(())
    }
}

/// Score every document and keep the best `k`, ties broken by doc id.
pub fn rank(query: &[WeightedTerm], index: &TermDocumentMatrix, k: usize, mu: f64) -> Result<RankedList> {
    if index.n_docs() == 0 {
        return Err(Error::EmptyCorpus);
    }
    if !(mu > 0.0) {
        return Err(Error::Config(format!("smoothing mu must be positive, got {mu}")));
    }
    let q = resolve(query, index);
    let mut scored: Vec<(usize, f64)> = (0..index.n_docs()).map(|d| (d, score_resolved(&q, d, index, mu))).collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| index.doc_id(a.0).cmp(index.doc_id(b.0))));
    scored.truncate(k);
    Ok(RankedList {
        k,
        entries: scored
            .into_iter()
            .enumerate()
            .map(|(r, (d, score))| RankedEntry {
                rank: r + 1,
                doc_id: index.doc_id(d).to_string(),
                title: index.title(d).to_string(),
                score,
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;

    fn doc(id: &str, text: &str) -> Document {
        Document {
            id: id.into(),
            title: format!("title {id}"),
            text: text.into(),
        }
    }

    fn q(pairs: &[(&str, f64)]) -> Vec<WeightedTerm> {
        pairs
            .iter()
            .map(|(t, w)| WeightedTerm {
                term: t.to_string(),
                weight: *w,
            })
            .collect()
    }

    fn toy() -> TermDocumentMatrix {
        TermDocumentMatrix::build(&[doc("d1", "atom atom nucleus"), doc("d2", "money bank")]).unwrap()
    }

    #[test]
    fn hand_smoothing() {
        let idx = toy();
        let atom = idx.term_id("atom").unwrap();
        // c=2, |d1|=3, p(atom|C)=2/5.
        let p = smoothed_prob(atom, 0, &idx, 2000.0);
        assert!((p - (2.0 + 800.0) / 2003.0).abs() < 1e-15);
        let p2 = smoothed_prob(atom, 1, &idx, 2000.0);
        assert!((p2 - 800.0 / 2002.0).abs() < 1e-15);
        assert!(smoothed_prob_of("atom", "zz", &idx, 2000.0).is_err());
    }

    #[test]
    fn normalizes_over_vocabulary() {
        let idx = toy();
        for d in 0..idx.n_docs() {
            let s: f64 = (0..idx.n_terms()).map(|t| smoothed_prob(t, d, &idx, DEFAULT_MU)).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn scores_and_ranking() {
        let idx = toy();
        let query = q(&[("atom", 1.0)]);
        assert!(score_document(&query, 0, &idx, DEFAULT_MU) > score_document(&query, 1, &idx, DEFAULT_MU));
        let single = score_document(&query, 1, &idx, DEFAULT_MU);
        assert_eq!(single, smoothed_prob(idx.term_id("atom").unwrap(), 1, &idx, DEFAULT_MU).ln());
        assert_eq!(score_document(&q(&[("atom", 0.0)]), 0, &idx, DEFAULT_MU), 0.0);
        let ranked = rank(&query, &idx, 30, DEFAULT_MU).unwrap();
        assert_eq!(ranked.doc_ids().collect::<Vec<_>>(), ["d1", "d2"]);
        assert_eq!(ranked.entries[0].rank, 1);
    }

    #[test]
    fn ties_break_by_doc_id() {
        let idx = TermDocumentMatrix::build(&[
            doc("c", "atom bank"),
            doc("a", "atom bank"),
            doc("b", "money"),
        ])
        .unwrap();
        let ranked = rank(&q(&[("atom", 1.0)]), &idx, 2, DEFAULT_MU).unwrap();
        assert_eq!(ranked.doc_ids().collect::<Vec<_>>(), ["a", "c"]);
    }

    #[test]
    fn huge_mu_flattens_scores() {
        let idx = toy();
        let query = q(&[("atom", 1.0), ("bank", 0.5)]);
        let a = score_document(&query, 0, &idx, 1e12);
        let b = score_document(&query, 1, &idx, 1e12);
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn jsonl_output() {
        let ranked = rank(&q(&[("atom", 1.0)]), &toy(), 1, DEFAULT_MU).unwrap();
        let mut buf = Vec::new();
        ranked.write_jsonl(&mut buf).unwrap();
        let line = String::from_utf8(buf).unwrap();
        assert!(line.starts_with("{\"rank\":1,\"doc_id\":\"d1\",\"title\":\"title d1\",\"score\":"));
    }
}
