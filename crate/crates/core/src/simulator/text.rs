use std::collections::BTreeSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng as _;

use super::SimulationConfig;
use crate::corpus::{is_stop_word, stem, Document, STOP_WORDS};
use crate::error::Result;
use crate::evaluation::{DocumentJudgments, JudgmentSet};
use crate::rng::{Rng, SeedTree};

/// Filler words that occur in every document.
const UNIVERSAL_WORDS: usize = 4;
const STOP_WORDS_PER_SENTENCE: usize = 2;
const TOPICAL_PER_SENTENCE: usize = 3;
const FILLERS_PER_SENTENCE: usize = 3;
const SENTENCES_PER_DOC: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct Topic {
    pub name: String,
    /// Topical words; each is its own Porter stem.
    pub terms: Vec<String>,
    /// The document read in the experiment.
    pub reading_doc: String,
    /// Sentences of the reading document, as words.
    pub reading_sentences: Vec<Vec<String>>,
    pub docs: Vec<String>,
}

impl Topic {
    pub fn term_set(&self) -> BTreeSet<&str> {
        self.terms.iter().map(String::as_str).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedCorpus {
    pub documents: Vec<Document>,
    pub topics: Vec<Topic>,
    /// Keyed by each topic's reading document.
    pub judgments: JudgmentSet,
    pub fillers: Vec<String>,
    pub universal: Vec<String>,
}

/// `n` distinct pronounceable pseudo-words that are their own stems, are
/// not stop words, and avoid everything in `taken`.
pub fn pseudo_words(n: usize, rng: &mut Rng, taken: &mut BTreeSet<String>) -> Vec<String> {
    const ONSETS: &[&str] = &["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "kl", "st", "tr"];
    const VOWELS: &[&str] = &["a", "e", "i", "o", "u"];
    const CODAS: &[&str] = &["d", "k", "m", "n", "p", "r", "t", "x"];
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let syllables = rng.random_range(2..=3);
        let mut w = String::new();
        for _ in 0..syllables {
            w.push_str(ONSETS.choose(rng).unwrap());
            w.push_str(VOWELS.choose(rng).unwrap());
        }
        w.push_str(CODAS.choose(rng).unwrap());
        if stem(&w) == w && !is_stop_word(&w) && taken.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

/// Relevance grade of the `i`-th of `n` documents in a topic: the first
/// third (including the reading document) 3, the next third 2, the rest 1.
fn grade(i: usize, n: usize) -> u8 {
    3 - (3 * i / n).min(2) as u8
}

fn sentence(
    own: &[String],
    own_count: usize,
    other: &[String],
    fillers: &[String],
    universal: &str,
    rng: &mut Rng,
) -> Vec<String> {
    let mut words: Vec<String> = own.choose_multiple(rng, own_count).cloned().collect();
    words.extend(other.choose_multiple(rng, TOPICAL_PER_SENTENCE - own_count).cloned());
    words.extend(fillers.choose_multiple(rng, FILLERS_PER_SENTENCE).cloned());
    words.extend(STOP_WORDS.choose_multiple(rng, STOP_WORDS_PER_SENTENCE).map(|s| s.to_string()));
    words.push(universal.to_string());
    words.shuffle(rng);
    words
}

/// Topical documents over pseudo-word vocabularies. Documents of grade `g`
/// draw `g` of every sentence's three topical words from their own topic
/// and the rest from one other topic; fillers and stop words pad every
/// sentence, and a handful of universal words occur in every document.
pub fn generate_corpus(config: &SimulationConfig) -> Result<SimulatedCorpus> {
    config.validate()?;
    let seeds = SeedTree::new(config.seed).child("corpus");
    let mut rng = seeds.child("vocabulary").rng();
    let mut taken = BTreeSet::new();
    let universal = pseudo_words(UNIVERSAL_WORDS, &mut rng, &mut taken);
    let fillers = pseudo_words(config.filler_words.max(FILLERS_PER_SENTENCE), &mut rng, &mut taken);
    let vocabularies: Vec<Vec<String>> =
        (0..config.n_topics).map(|_| pseudo_words(config.terms_per_topic, &mut rng, &mut taken)).collect();

    let mut documents = Vec::new();
    let mut topics = Vec::new();
    let mut judgments = JudgmentSet::new();
    for t in 0..config.n_topics {
        let mut rng = seeds.child("topic").index(t as u64).rng();
        let name = format!("topic{:02}", t + 1);
        let mut docs = Vec::new();
        let mut reading_sentences = Vec::new();
        let reading_doc = format!("t{:02}-d00", t + 1);
        let mut judged = DocumentJudgments::new(reading_doc.clone());
        for i in 0..config.docs_per_topic {
            let id = format!("t{:02}-d{:02}", t + 1, i);
            let g = grade(i, config.docs_per_topic);
            let mut other_topic = rng.random_range(0..config.n_topics - 1);
            if other_topic >= t {
                other_topic += 1;
            }
            let own_count = if i == 0 { TOPICAL_PER_SENTENCE } else { usize::from(g) };
            let sentences: Vec<Vec<String>> = (0..SENTENCES_PER_DOC)
                .map(|s| {
                    sentence(
                        &vocabularies[t],
                        own_count,
                        &vocabularies[other_topic],
                        &fillers,
                        &universal[s % universal.len()],
                        &mut rng,
                    )
                })
                .collect();
            let text = sentences.iter().map(|s| s.join(" ") + ".").collect::<Vec<_>>().join(" ");
            if i == 0 {
                reading_sentences = sentences;
            }
            judged.set(id.clone(), g)?;
            documents.push(Document {
                id: id.clone(),
                title: format!("{name} document {i}"),
                text,
            });
            docs.push(id);
        }
        judgments.insert(reading_doc.clone(), judged);
        topics.push(Topic {
            name,
            terms: vocabularies[t].clone(),
            reading_doc,
            reading_sentences,
            docs,
        });
    }
    Ok(SimulatedCorpus {
        documents,
        topics,
        judgments,
        fillers,
        universal,
    })
}
