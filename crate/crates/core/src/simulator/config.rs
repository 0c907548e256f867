use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Channel names, 10–20 positions around the midline.
const CHANNELS: [&str; 8] = ["Fz", "C3", "Cz", "C4", "CP1", "CPz", "CP2", "Pz"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub n_channels: usize,
    pub fs: f64,
    pub n_blocks: usize,
    pub trials_per_block: usize,
    /// Standard deviation of the white background noise, µV.
    pub noise_sd: f64,
    /// Peak negativity on irrelevant words in 350–500 ms, µV.
    pub n400_amp: f64,
    /// Peak positivity on relevant words in 500–850 ms, µV.
    pub p600_amp: f64,
    pub affected_channels: Vec<usize>,
    pub n_topics: usize,
    pub docs_per_topic: usize,
    pub terms_per_topic: usize,
    pub filler_words: usize,
    /// Blink-like 60 µV transients per second in continuous recordings.
    pub blink_rate_hz: f64,
    pub seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            n_channels: CHANNELS.len(),
            fs: 200.0,
            n_blocks: 8,
            trials_per_block: 6,
            noise_sd: 8.0,
            n400_amp: 0.8,
            p600_amp: 1.0,
            affected_channels: vec![2, 5, 7],
            n_topics: 16,
            docs_per_topic: 20,
            terms_per_topic: 30,
            filler_words: 200,
            blink_rate_hz: 0.0,
            seed: 0,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n_channels == 0 {
            return bad("simulation needs at least one channel".into());
        }
        if !(self.noise_sd > 0.0) || !self.noise_sd.is_finite() {
            return bad(format!("noise_sd must be positive, got {}", self.noise_sd));
        }
        if !self.n400_amp.is_finite() || !self.p600_amp.is_finite() {
            return bad("ERP amplitudes must be finite".into());
        }
        if self.affected_channels.is_empty() || self.affected_channels.iter().any(|&c| c >= self.n_channels) {
            return bad(format!("affected channels {:?} invalid for {} channels", self.affected_channels, self.n_channels));
        }
        if self.n_topics < 2 {
            return bad(format!("need at least 2 topics, got {}", self.n_topics));
        }
        if self.n_blocks < 1 || 2 * self.n_blocks > self.n_topics {
            return bad(format!("{} blocks need {} topics, have {}", self.n_blocks, 2 * self.n_blocks, self.n_topics));
        }
        if self.docs_per_topic < 1 || self.terms_per_topic < 4 || self.trials_per_block < 1 {
            return bad("docs_per_topic ≥ 1, terms_per_topic ≥ 4 and trials_per_block ≥ 1 required".into());
        }
        if self.fs < crate::eeg::filter::MIN_FS_HZ {
            return Err(Error::SamplingRateTooLow {
                fs: self.fs,
                min: crate::eeg::filter::MIN_FS_HZ,
            });
        }
        if !(self.blink_rate_hz >= 0.0) {
            return bad(format!("blink rate must be non-negative, got {}", self.blink_rate_hz));
        }
        Ok(())
    }

    pub fn channel_names(&self) -> Vec<String> {
        (0..self.n_channels)
            .map(|c| CHANNELS.get(c).map_or_else(|| format!("E{}", c + 1), |s| s.to_string()))
            .collect()
    }
}
