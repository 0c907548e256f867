use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Graded relevance (0–3) of documents with respect to one topic document.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentJudgments {
    pub topic: String,
    pub scores: BTreeMap<String, u8>,
}

impl DocumentJudgments {
    pub fn new(topic: impl Into<String>) -> Self {
        Self {
            topic: topic.into(),
            scores: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, doc: impl Into<String>, score: u8) -> Result<()> {
        if score > 3 {
            return Err(Error::Config(format!("relevance grade {score} outside 0..=3")));
        }
        self.scores.insert(doc.into(), score);
        Ok(())
    }

    /// Grade of `doc`; unjudged documents score 0.
    pub fn score(&self, doc: &str) -> u8 {
        self.scores.get(doc).copied().unwrap_or(0)
    }

    /// Highest achievable cumulative gain at depth `k`.
    pub fn ideal_gain(&self, k: usize) -> f64 {
        let mut grades: Vec<u8> = self.scores.values().copied().collect();
        grades.sort_unstable_by(|a, b| b.cmp(a));
        super::gain_at(&grades, k)
    }
}

/// One line of a judgments file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgmentRecord {
    pub topic: String,
    pub doc: String,
    pub score: u8,
}

/// Judgments keyed by topic document id.
pub type JudgmentSet = BTreeMap<String, DocumentJudgments>;

pub fn read_judgments(path: &Path) -> Result<JudgmentSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut set = JudgmentSet::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: JudgmentRecord = serde_json::from_str(line).map_err(|e| Error::malformed(path, n + 1, e))?;
        set.entry(rec.topic.clone())
            .or_insert_with(|| DocumentJudgments::new(rec.topic.clone()))
            .set(rec.doc, rec.score)
            .map_err(|e| Error::malformed(path, n + 1, e))?;
    }
    Ok(set)
}

/// Serialize in topic then document order.
pub fn judgments_to_jsonl(set: &JudgmentSet) -> Result<String> {
    let mut out = String::new();
    for j in set.values() {
        for (doc, &score) in &j.scores {
            let rec = JudgmentRecord {
                topic: j.topic.clone(),
                doc: doc.clone(),
                score,
            };
            out.push_str(&serde_json::to_string(&rec)?);
            out.push('\n');
        }
    }
    Ok(out)
}
