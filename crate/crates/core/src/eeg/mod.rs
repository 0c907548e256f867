//! EEG preprocessing: band-pass filtering, word-locked epoching with
//! baseline correction, artifact rejection, spatio-temporal features and
//! ERP interval statistics.

mod artifacts;
mod epochs;
pub mod erp;
mod features;
pub mod filter;
pub mod io;
mod types;

pub use artifacts::{
    reject_artifacts, Cleaned, RejectionReport, MAX_CHANNEL_INVALID_FRACTION, MAX_PEAK_TO_PEAK_UV,
    MIN_VARIANCE_UV2,
};
pub use epochs::cut_epochs;
pub use erp::{grand_average, interval_test, ErpCurve};
pub use features::{epoch_features, extract_features, FeatureMatrix, FeatureWindows};
pub use filter::{filter, BandPass};
pub use types::{
    epoch_samples, pre_stimulus_samples, time_ms, window_samples, Epoch, Event, Label, Recording,
    StimulusKind, EPOCH_END_MS, EPOCH_START_MS,
};
