//! Brain-relevance pipeline: single-trial ERP term-relevance classification,
//! LinRel intent modeling over a tf-idf term-document index, and
//! Dirichlet-smoothed query-likelihood retrieval, plus the leave-one-block-out
//! and permutation-test evaluation harness and a synthetic participant
//! simulator.
//!
//! The data flow for one held-out reading block is
//!
//! ```text
//! epochs ──features──▶ shrinkage LDA ──p(relevant)──▶ feedback ──LinRel──▶ intent
//!                                                                            │
//!                          cumulative gain ◀──judgments── ranked list ◀──query likelihood
//! ```

pub mod classifier;
pub mod config;
pub mod corpus;
pub mod eeg;
pub mod error;
pub mod evaluation;
pub mod intent;
pub mod retrieval;
pub mod rng;
pub mod simulator;
pub mod stats;

pub use error::{Error, Result};
