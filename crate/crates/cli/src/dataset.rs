//! On-disk dataset layout written by `simulate` and read by `run-block`,
//! `evaluate` and `report`:
//!
//! ```text
//! dataset.json       manifest (below)
//! corpus.jsonl       documents
//! judgments.jsonl    graded relevance per topic document
//! <participant>.epochs
//! ```
//!
//! The manifest lists each participant's epoch file and, per block, the
//! relevant and irrelevant document read.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use neurorel::corpus::{read_corpus, Document};
use neurorel::eeg::io::EpochSet;
use neurorel::evaluation::{read_judgments, ExperimentBlock, JudgmentSet, ParticipantData};
use neurorel::{Error, Result};
use serde::{Deserialize, Serialize};

pub const MANIFEST: &str = "dataset.json";
const FORMAT: &str = "neurorel-dataset";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockEntry {
    pub id: u32,
    pub relevant_doc: String,
    pub irrelevant_doc: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantEntry {
    pub id: String,
    pub epochs: String,
    pub blocks: Vec<BlockEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub version: u32,
    pub corpus: String,
    pub judgments: String,
    pub participants: Vec<ParticipantEntry>,
    pub config_hash: String,
    pub seed: u64,
}

impl Manifest {
    pub fn new(participants: Vec<ParticipantEntry>, config_hash: String, seed: u64) -> Self {
        Self {
            format: FORMAT.into(),
            version: 1,
            corpus: "corpus.jsonl".into(),
            judgments: "judgments.jsonl".into(),
            participants,
            config_hash,
            seed,
        }
    }
}

/// A dataset directory with its manifest loaded.
pub struct Dataset {
    pub root: PathBuf,
    pub manifest: Manifest,
}

impl Dataset {
    pub fn open(root: &Path) -> Result<Self> {
        let path = root.join(MANIFEST);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
        let manifest: Manifest = serde_json::from_str(&text).map_err(|e| Error::Malformed {
            path: path.clone(),
            record: 1,
            message: e.to_string(),
        })?;
        if manifest.format != FORMAT || manifest.version != 1 {
            return Err(Error::Malformed {
                path,
                record: 1,
                message: format!("unsupported format {} v{}", manifest.format, manifest.version),
            });
        }
        Ok(Self {
            root: root.to_path_buf(),
            manifest,
        })
    }

    pub fn corpus(&self) -> Result<Vec<Document>> {
        read_corpus(&self.root.join(&self.manifest.corpus))
    }

    pub fn judgments(&self) -> Result<JudgmentSet> {
        read_judgments(&self.root.join(&self.manifest.judgments))
    }

    pub fn participant_entry(&self, id: &str) -> Result<&ParticipantEntry> {
        self.manifest
            .participants
            .iter()
            .find(|p| p.id == id)
            .ok_or_else(|| Error::Config(format!("participant {id:?} not in {}", self.root.join(MANIFEST).display())))
    }

    /// Epochs of one participant grouped into the manifest's blocks.
    pub fn participant(&self, entry: &ParticipantEntry) -> Result<ParticipantData> {
        let path = self.root.join(&entry.epochs);
        let set = EpochSet::load(&path)?;
        let mut by_block: BTreeMap<u32, Vec<_>> = entry.blocks.iter().map(|b| (b.id, Vec::new())).collect();
        for (n, e) in set.epochs.into_iter().enumerate() {
            let block = e.block;
            by_block
                .get_mut(&block)
                .ok_or_else(|| Error::Malformed {
                    path: path.clone(),
                    record: n + 1,
                    message: format!("epoch block {block} not listed for participant {}", entry.id),
                })?
                .push(e);
        }
        Ok(ParticipantData {
            id: entry.id.clone(),
            channel_names: set.channel_names,
            fs: set.fs,
            blocks: entry
                .blocks
                .iter()
                .map(|b| ExperimentBlock {
                    id: b.id,
                    relevant_doc: b.relevant_doc.clone(),
                    irrelevant_doc: b.irrelevant_doc.clone(),
                    epochs: by_block.remove(&b.id).unwrap_or_default(),
                })
                .collect(),
        })
    }
}
