use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::sparse::SparseMatrix;
use super::text::{analyze, term_of};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub title: String,
    pub text: String,
}

/// tf-idf weighted term-document index plus the raw counts and collection
/// statistics needed by the language-model scorer.
///
/// Terms are sorted lexicographically, documents keep corpus order. Weights
/// are `tf * ln(N / df)`: raw term frequency, natural log, no smoothing, so a
/// term occurring in every document weighs zero everywhere.
#[derive(Debug, Clone)]
pub struct TermDocumentMatrix {
    vocabulary: Vec<String>,
    term_ids: HashMap<String, usize>,
    doc_ids: Vec<String>,
    titles: Vec<String>,
    doc_pos: HashMap<String, usize>,
    /// Per document, `(term, count)` sorted by term.
    counts: Vec<Vec<(usize, u32)>>,
    doc_lengths: Vec<u64>,
    doc_freq: Vec<usize>,
    idf: Vec<f64>,
    collection_probs: Vec<f64>,
    weights: SparseMatrix,
}

#[derive(Serialize, Deserialize)]
struct IndexFile {
    format: String,
    version: u32,
    vocabulary: Vec<String>,
    documents: Vec<IndexedDocument>,
}

#[derive(Serialize, Deserialize)]
struct IndexedDocument {
    id: String,
    title: String,
    counts: Vec<(usize, u32)>,
}

const INDEX_FORMAT: &str = "neurorel-index";
const INDEX_VERSION: u32 = 1;

impl TermDocumentMatrix {
    pub fn build(corpus: &[Document]) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let analyzed: Vec<Vec<String>> = corpus.iter().map(|d| analyze(&d.text)).collect();
        if let Some(pos) = analyzed.iter().position(Vec::is_empty) {
            return Err(Error::EmptyDocument(corpus[pos].id.clone()));
        }
        let mut vocabulary: Vec<String> = analyzed.iter().flatten().cloned().collect();
        vocabulary.sort_unstable();
        vocabulary.dedup();
        let term_ids: HashMap<&str, usize> = vocabulary
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i))
            .collect();

        let counts = analyzed
            .iter()
            .map(|terms| {
                let mut ids: Vec<usize> = terms.iter().map(|t| term_ids[t.as_str()]).collect();
                ids.sort_unstable();
                let mut out: Vec<(usize, u32)> = Vec::new();
                for id in ids {
                    match out.last_mut() {
                        Some((last, c)) if *last == id => *c += 1,
                        _ => out.push((id, 1)),
                    }
                }
                out
            })
            .collect();
        let docs = corpus
            .iter()
            .map(|d| (d.id.clone(), d.title.clone()))
            .collect();
        Self::from_counts(vocabulary, docs, counts)
    }

    fn from_counts(
        vocabulary: Vec<String>,
        docs: Vec<(String, String)>,
        counts: Vec<Vec<(usize, u32)>>,
    ) -> Result<Self> {
        if docs.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let n_terms = vocabulary.len();
        let n_docs = docs.len();
        let mut doc_pos = HashMap::with_capacity(n_docs);
        for (j, (id, _)) in docs.iter().enumerate() {
            if doc_pos.insert(id.clone(), j).is_some() {
                return Err(Error::DuplicateDocument(id.clone()));
            }
        }

        let mut doc_freq = vec![0usize; n_terms];
        let mut term_totals = vec![0u64; n_terms];
        let mut doc_lengths = Vec::with_capacity(n_docs);
        for (j, doc) in counts.iter().enumerate() {
            if doc.is_empty() {
                return Err(Error::EmptyDocument(docs[j].0.clone()));
            }
            let mut len = 0u64;
            for &(i, c) in doc {
                doc_freq[i] += 1;
                term_totals[i] += u64::from(c);
                len += u64::from(c);
            }
            doc_lengths.push(len);
        }
        let total: u64 = doc_lengths.iter().sum();
        let collection_probs = term_totals
            .iter()
            .map(|&c| c as f64 / total as f64)
            .collect();
        let idf: Vec<f64> = doc_freq
            .iter()
            .map(|&df| if df == 0 { 0.0 } else { (n_docs as f64 / df as f64).ln() })
            .collect();

        let mut rows = vec![Vec::new(); n_terms];
        for (j, doc) in counts.iter().enumerate() {
            for &(i, c) in doc {
                rows[i].push((j, f64::from(c) * idf[i]));
            }
        }
        let weights = SparseMatrix::from_rows(n_docs, rows);
        let term_ids = vocabulary
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        let (doc_ids, titles) = docs.into_iter().unzip();

        Ok(Self {
            vocabulary,
            term_ids,
            doc_ids,
            titles,
            doc_pos,
            counts,
            doc_lengths,
            doc_freq,
            idf,
            collection_probs,
            weights,
        })
    }

    pub fn n_terms(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn n_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn term(&self, i: usize) -> &str {
        &self.vocabulary[i]
    }

    pub fn term_id(&self, term: &str) -> Option<usize> {
        self.term_ids.get(term).copied()
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn doc_id(&self, j: usize) -> &str {
        &self.doc_ids[j]
    }

    pub fn title(&self, j: usize) -> &str {
        &self.titles[j]
    }

    pub fn doc_index(&self, doc_id: &str) -> Result<usize> {
        self.doc_pos
            .get(doc_id)
            .copied()
            .ok_or_else(|| Error::UnknownDocument(doc_id.to_owned()))
    }

    /// The tf-idf matrix, terms as rows.
    pub fn weights(&self) -> &SparseMatrix {
        &self.weights
    }

    /// `c(k_i | d_j)`.
    pub fn count(&self, term: usize, doc: usize) -> u32 {
        let row = &self.counts[doc];
        row.binary_search_by_key(&term, |&(i, _)| i)
            .map_or(0, |pos| row[pos].1)
    }

    /// `(term, count)` pairs of one document, sorted by term.
    pub fn doc_counts(&self, doc: usize) -> &[(usize, u32)] {
        &self.counts[doc]
    }

    pub fn doc_length(&self, doc: usize) -> u64 {
        self.doc_lengths[doc]
    }

    pub fn doc_freq(&self, term: usize) -> usize {
        self.doc_freq[term]
    }

    pub fn idf(&self, term: usize) -> f64 {
        self.idf[term]
    }

    /// `p(k_i | C)`: share of all corpus tokens that are term `i`.
    pub fn collection_prob(&self, term: usize) -> f64 {
        self.collection_probs[term]
    }

    pub fn collection_probs(&self) -> &[f64] {
        &self.collection_probs
    }

    /// Weight of an index term (already stemmed) in a document; zero when the
    /// term is not in the vocabulary or not in the document.
    pub fn tfidf_of(&self, term: &str, doc_id: &str) -> Result<f64> {
        let j = self.doc_index(doc_id)?;
        Ok(self.term_id(term).map_or(0.0, |i| self.weights.get(i, j)))
    }

    /// Like [`tfidf_of`](Self::tfidf_of) for a surface word, which is
    /// analyzed first. Stop words weigh zero.
    pub fn tfidf_of_word(&self, word: &str, doc_id: &str) -> Result<f64> {
        match term_of(word) {
            Some(term) => self.tfidf_of(&term, doc_id),
            None => self.doc_index(doc_id).map(|_| 0.0),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let file = IndexFile {
            format: INDEX_FORMAT.to_owned(),
            version: INDEX_VERSION,
            vocabulary: self.vocabulary.clone(),
            documents: self
                .doc_ids
                .iter()
                .zip(&self.titles)
                .zip(&self.counts)
                .map(|((id, title), counts)| IndexedDocument {
                    id: id.clone(),
                    title: title.clone(),
                    counts: counts.clone(),
                })
                .collect(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let file: IndexFile = serde_json::from_str(json)?;
        if file.format != INDEX_FORMAT || file.version != INDEX_VERSION {
            return Err(Error::Config(format!(
                "unsupported index format {} v{}",
                file.format, file.version
            )));
        }
        let n_terms = file.vocabulary.len();
        let mut docs = Vec::with_capacity(file.documents.len());
        let mut counts = Vec::with_capacity(file.documents.len());
        for doc in file.documents {
            if doc.counts.iter().any(|&(i, c)| i >= n_terms || c == 0) {
                return Err(Error::Config(format!("corrupt counts for document {:?}", doc.id)));
            }
            docs.push((doc.id, doc.title));
            counts.push(doc.counts);
        }
        Self::from_counts(file.vocabulary, docs, counts)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&json).map_err(|e| Error::malformed(path, 0, e))
    }
}

/// Read a JSON-lines corpus (`id`, `title`, `text` per line).
pub fn read_corpus(path: &Path) -> Result<Vec<Document>> {
    let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut docs: Vec<Document> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (line_no, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document =
            serde_json::from_str(line).map_err(|e| Error::malformed(path, line_no + 1, e))?;
        if analyze(&doc.text).is_empty() {
            return Err(Error::malformed(
                path,
                line_no + 1,
                format!("document {:?} has no indexable terms", doc.id),
            ));
        }
        if !seen.insert(doc.id.clone()) {
            return Err(Error::malformed(
                path,
                line_no + 1,
                format!("duplicate document id {:?}", doc.id),
            ));
        }
        docs.push(doc);
    }
    Ok(docs)
}

pub fn corpus_to_jsonl(docs: &[Document]) -> Result<String> {
    let mut out = String::new();
    for doc in docs {
        out.push_str(&serde_json::to_string(doc)?);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, text: &str) -> Document {
        Document {
            id: id.into(),
            title: id.to_uppercase(),
            text: text.into(),
        }
    }

    fn toy() -> TermDocumentMatrix {
        TermDocumentMatrix::build(&[doc("d1", "atom atom nucleus"), doc("d2", "money bank")]).unwrap()
    }

    #[test]
    fn tfidf_hand_values() {
        let m = toy();
        let ln2 = 2f64.ln();
        assert!((m.tfidf_of("atom", "d1").unwrap() - 2.0 * ln2).abs() < 1e-12);
        assert!((m.tfidf_of("atom", "d1").unwrap() - 1.3863).abs() < 1e-4);
        assert!((m.tfidf_of("nucleu", "d1").unwrap() - ln2).abs() < 1e-12);
        assert_eq!(m.tfidf_of("atom", "d2").unwrap(), 0.0);
        assert_eq!(m.tfidf_of("zebra", "d1").unwrap(), 0.0);
        assert_eq!(m.tfidf_of_word("the", "d1").unwrap(), 0.0);
        assert_eq!(m.tfidf_of_word("Atoms", "d1").unwrap(), 2.0 * ln2);
        assert!(matches!(m.tfidf_of("atom", "d3"), Err(Error::UnknownDocument(_))));
    }

    #[test]
    fn ubiquitous_term_weighs_zero() {
        let m = TermDocumentMatrix::build(&[doc("a", "shared atom"), doc("b", "shared money")]).unwrap();
        assert_eq!(m.tfidf_of("share", "a").unwrap(), 0.0);
        assert_eq!(m.tfidf_of("share", "b").unwrap(), 0.0);
        assert!(m.tfidf_of("atom", "a").unwrap() > 0.0);
    }

    #[test]
    fn counts_and_collection_statistics() {
        let m = toy();
        let atom = m.term_id("atom").unwrap();
        assert_eq!(m.count(atom, 0), 2);
        assert_eq!(m.doc_length(0), 3);
        assert_eq!(m.doc_length(1), 2);
        assert!((m.collection_prob(atom) - 0.4).abs() < 1e-15);
        let total: f64 = m.collection_probs().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn build_errors() {
        assert!(matches!(TermDocumentMatrix::build(&[]), Err(Error::EmptyCorpus)));
        let err = TermDocumentMatrix::build(&[doc("ok", "atom"), doc("bad", "the and of")]).unwrap_err();
        assert!(matches!(err, Error::EmptyDocument(ref id) if id == "bad"), "{err}");
        assert!(matches!(
            TermDocumentMatrix::build(&[doc("x", "atom"), doc("x", "bank")]),
            Err(Error::DuplicateDocument(_))
        ));
    }

    #[test]
    fn json_round_trip_preserves_statistics() {
        let m = toy();
        let back = TermDocumentMatrix::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back.vocabulary(), m.vocabulary());
        assert_eq!(back.weights(), m.weights());
        assert_eq!(back.collection_probs(), m.collection_probs());
        assert_eq!(back.title(1), "D2");
    }
}
