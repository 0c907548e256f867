//! Single-trial shrinkage LDA relevance classifier.

mod lda;
mod shrinkage;

pub use lda::{binarize, binarize_at, LdaModel};
pub use shrinkage::{shrink_covariance, Shrinkage, ShrunkCovariance};
