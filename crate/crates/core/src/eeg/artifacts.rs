//! Two-pass channel and epoch rejection.
//!
//! An epoch is invalid on a channel when that channel is flat (variance below
//! [`MIN_VARIANCE_UV2`]) or its peak-to-peak range exceeds
//! [`MAX_PEAK_TO_PEAK_UV`]. Pass one removes every channel that invalidates
//! more than [`MAX_CHANNEL_INVALID_FRACTION`] of all epochs; pass two drops
//! the epochs still invalid on the remaining channels.

use serde::{Deserialize, Serialize};

use super::types::{Epoch, Label};
use crate::error::{Error, Result};

pub const MIN_VARIANCE_UV2: f64 = 0.5;
pub const MAX_PEAK_TO_PEAK_UV: f64 = 40.0;
pub const MAX_CHANNEL_INVALID_FRACTION: f64 = 0.10;

/// Counts mirroring the per-participant cleaning table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionReport {
    pub recorded_channels: usize,
    pub accepted_channels: usize,
    pub removed_channels: Vec<String>,
    pub recorded_epochs: usize,
    pub accepted_epochs: usize,
    pub rejected_epochs: usize,
    pub relevant_epochs: usize,
    pub irrelevant_epochs: usize,
}

#[derive(Debug, Clone)]
pub struct Cleaned {
    pub epochs: Vec<Epoch>,
    pub kept_channels: Vec<usize>,
    pub channel_names: Vec<String>,
    pub report: RejectionReport,
}

fn channel_invalid(x: &[f64]) -> bool {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    var < MIN_VARIANCE_UV2 || hi - lo > MAX_PEAK_TO_PEAK_UV
}

pub fn reject_artifacts(epochs: &[Epoch], channel_names: &[String]) -> Result<Cleaned> {
    let m = channel_names.len();
    if let Some(e) = epochs.iter().find(|e| e.n_channels != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: e.n_channels,
        });
    }
    // invalid[e][c]
    let invalid: Vec<Vec<bool>> = epochs
        .iter()
        .map(|e| (0..m).map(|c| channel_invalid(e.channel(c))).collect())
        .collect();

    let limit = MAX_CHANNEL_INVALID_FRACTION * epochs.len() as f64;
    let kept_channels: Vec<usize> = (0..m)
        .filter(|&c| (invalid.iter().filter(|row| row[c]).count() as f64) <= limit)
        .collect();
    if kept_channels.is_empty() {
        return Err(Error::NoUsableChannels);
    }

    let accepted: Vec<Epoch> = epochs
        .iter()
        .zip(&invalid)
        .filter(|(_, row)| kept_channels.iter().all(|&c| !row[c]))
        .map(|(e, _)| e.select_channels(&kept_channels))
        .collect();

    let count = |label| accepted.iter().filter(|e| e.label == label).count();
    let report = RejectionReport {
        recorded_channels: m,
        accepted_channels: kept_channels.len(),
        removed_channels: (0..m)
            .filter(|c| !kept_channels.contains(c))
            .map(|c| channel_names[c].clone())
            .collect(),
        recorded_epochs: epochs.len(),
        accepted_epochs: accepted.len(),
        rejected_epochs: epochs.len() - accepted.len(),
        relevant_epochs: count(Label::Relevant),
        irrelevant_epochs: count(Label::Irrelevant),
    };
    Ok(Cleaned {
        epochs: accepted,
        channel_names: kept_channels.iter().map(|&c| channel_names[c].clone()).collect(),
        kept_channels,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Clean channel: ±5 µV alternating (variance 25, range 10).
    fn clean() -> Vec<f64> {
        (0..250).map(|k| if k % 2 == 0 { 5.0 } else { -5.0 }).collect()
    }

    fn epoch(channels: Vec<Vec<f64>>, label: Label) -> Epoch {
        Epoch {
            n_channels: channels.len(),
            n_samples: 250,
            fs: 200.0,
            data: channels.concat(),
            word: "w".into(),
            block: 1,
            label,
            doc: None,
        }
    }

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|c| format!("C{c}")).collect()
    }

    #[test]
    fn all_clean_keeps_everything() {
        let epochs: Vec<Epoch> = (0..10).map(|_| epoch(vec![clean(), clean(), clean()], Label::Irrelevant)).collect();
        let out = reject_artifacts(&epochs, &names(3)).unwrap();
        assert_eq!(out.epochs.len(), 10);
        assert_eq!(out.kept_channels, vec![0, 1, 2]);
        assert_eq!(out.report.rejected_epochs, 0);
    }

    #[test]
    fn large_swing_on_one_channel_invalidates_epoch() {
        let mut swing = clean();
        swing[100] = 45.0; // range 50 µV
        let mut epochs: Vec<Epoch> = (0..19).map(|_| epoch(vec![clean(), clean(), clean()], Label::Irrelevant)).collect();
        epochs.push(epoch(vec![clean(), swing, clean()], Label::Relevant));
        let out = reject_artifacts(&epochs, &names(3)).unwrap();
        // 1/20 = 5% does not remove the channel, so the epoch goes.
        assert_eq!(out.kept_channels, vec![0, 1, 2]);
        assert_eq!(out.epochs.len(), 19);
        assert_eq!(out.report.relevant_epochs, 0);
    }

    #[test]
    fn flat_channel_is_removed_and_epochs_kept() {
        // Hand trace on a 3-channel toy set: channel 1 is flat in every
        // epoch, so it invalidates 100% > 10% and is dropped in pass one;
        // pass two finds no invalid epochs on channels 0 and 2.
        let epochs: Vec<Epoch> = (0..8).map(|_| epoch(vec![clean(), vec![0.0; 250], clean()], Label::Irrelevant)).collect();
        let out = reject_artifacts(&epochs, &names(3)).unwrap();
        assert_eq!(out.kept_channels, vec![0, 2]);
        assert_eq!(out.report.removed_channels, vec!["C1".to_string()]);
        assert_eq!(out.epochs.len(), 8);
        assert_eq!(out.epochs[0].n_channels, 2);
        assert_eq!(out.channel_names, vec!["C0".to_string(), "C2".to_string()]);
    }

    #[test]
    fn all_channels_bad_is_an_error() {
        let epochs: Vec<Epoch> = (0..4).map(|_| epoch(vec![vec![0.0; 250]], Label::Irrelevant)).collect();
        assert!(matches!(reject_artifacts(&epochs, &names(1)), Err(Error::NoUsableChannels)));
    }

    #[test]
    fn conserves_epoch_counts() {
        let mut swing = clean();
        swing[3] = 60.0;
        let epochs: Vec<Epoch> = (0..30)
            .map(|i| {
                let ch1 = if i % 7 == 0 { swing.clone() } else { clean() };
                epoch(vec![clean(), ch1], if i % 3 == 0 { Label::Relevant } else { Label::Irrelevant })
            })
            .collect();
        let out = reject_artifacts(&epochs, &names(2)).unwrap();
        let r = &out.report;
        assert_eq!(r.accepted_epochs + r.rejected_epochs, r.recorded_epochs);
        assert_eq!(r.relevant_epochs + r.irrelevant_epochs, r.accepted_epochs);
    }
}
