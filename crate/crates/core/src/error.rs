use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty corpus")]
    EmptyCorpus,

    #[error("document {0:?} has no indexable terms")]
    EmptyDocument(String),

    #[error("duplicate document id {0:?}")]
    DuplicateDocument(String),

    #[error("unknown document {0:?}")]
    UnknownDocument(String),

    #[error("sampling rate {fs} Hz is too low (need at least {min} Hz)")]
    SamplingRateTooLow { fs: f64, min: f64 },

    #[error("no usable channels")]
    NoUsableChannels,

    #[error("no epochs in condition {0}")]
    EmptyCondition(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("degenerate training set: {0}")]
    DegenerateTrainingSet(String),

    #[error("covariance is not positive definite")]
    NotPositiveDefinite,

    #[error("both classes must be present")]
    SingleClass,

    #[error("zero variance of paired differences (constant difference {0})")]
    ConstantDifference(f64),

    #[error("no positive terms")]
    NoPositiveTerms,

    #[error("no positive weights in intent model")]
    NoPositiveWeights,

    #[error("invalid feedback: {0}")]
    InvalidFeedback(String),

    #[error("need at least {needed} blocks, got {got}")]
    TooFewBlocks { needed: usize, got: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: record {record}: {message}")]
    Malformed {
        path: PathBuf,
        record: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(path: impl Into<PathBuf>, record: usize, message: impl ToString) -> Self {
        Error::Malformed {
            path: path.into(),
            record,
            message: message.to_string(),
        }
    }

    /// Short stable identifier used in machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyCorpus => "empty_corpus",
            Error::EmptyDocument(_) => "empty_document",
            Error::DuplicateDocument(_) => "duplicate_document",
            Error::UnknownDocument(_) => "unknown_document",
            Error::SamplingRateTooLow { .. } => "sampling_rate_too_low",
            Error::NoUsableChannels => "no_usable_channels",
            Error::EmptyCondition(_) => "empty_condition",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::TooFewSamples { .. } => "too_few_samples",
            Error::DegenerateTrainingSet(_) => "degenerate_training_set",
            Error::NotPositiveDefinite => "not_positive_definite",
            Error::SingleClass => "single_class",
            Error::ConstantDifference(_) => "constant_difference",
            Error::NoPositiveTerms => "no_positive_terms",
            Error::NoPositiveWeights => "no_positive_weights",
            Error::InvalidFeedback(_) => "invalid_feedback",
            Error::TooFewBlocks { .. } => "too_few_blocks",
            Error::Config(_) => "config",
            Error::Malformed { .. } => "malformed_input",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
        }
    }
}
