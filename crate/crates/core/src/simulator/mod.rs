//! Synthetic participants: a topical corpus with graded judgments, reading
//! blocks built from it, and word-locked EEG with class-dependent ERP
//! deflections on a few centro-parietal channels.
//!
//! Every draw comes from a [`SeedTree`](crate::rng::SeedTree) path, so the
//! corpus, each participant and each block are reproducible independently.

mod config;
mod signal;
mod text;

pub use config::SimulationConfig;
pub use signal::{generate_epoch, simulate_participant, simulate_recording, template};
pub use text::{generate_corpus, pseudo_words, SimulatedCorpus, Topic};
