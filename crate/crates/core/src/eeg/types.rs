use serde::{Deserialize, Serialize};

/// Epoch window relative to word onset, in milliseconds.
pub const EPOCH_START_MS: f64 = -250.0;
pub const EPOCH_END_MS: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Relevant,
    Irrelevant,
    Unlabeled,
}

impl Label {
    pub fn is_relevant(self) -> bool {
        self == Label::Relevant
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            Label::Unlabeled => 0,
            Label::Relevant => 1,
            Label::Irrelevant => 2,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Label::Unlabeled),
            1 => Some(Label::Relevant),
            2 => Some(Label::Irrelevant),
            _ => None,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Label::Relevant => "relevant",
            Label::Irrelevant => "irrelevant",
            Label::Unlabeled => "unlabeled",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StimulusKind {
    Word,
    Separator,
}

/// One stimulus onset in a continuous recording.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub sample: usize,
    pub word: String,
    pub block: u32,
    pub kind: StimulusKind,
    /// The participant's judgment of the word, as logged by the stimulus
    /// software. `Unlabeled` when no judgment exists.
    pub label: Label,
    /// Document the word was taken from.
    pub doc: Option<String>,
}

/// Continuous multichannel EEG in µV, channel-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    pub participant: String,
    pub channel_names: Vec<String>,
    pub fs: f64,
    pub data: Vec<Vec<f64>>,
    pub events: Vec<Event>,
}

impl Recording {
    pub fn n_samples(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }
}

/// One word-locked EEG segment from −250 ms to 1000 ms, stored as an
/// `n_channels × n_samples` row-major matrix in µV.
#[derive(Debug, Clone, PartialEq)]
pub struct Epoch {
    pub n_channels: usize,
    pub n_samples: usize,
    pub fs: f64,
    pub data: Vec<f64>,
    pub word: String,
    pub block: u32,
    pub label: Label,
    pub doc: Option<String>,
}

impl Epoch {
    pub fn channel(&self, c: usize) -> &[f64] {
        &self.data[c * self.n_samples..(c + 1) * self.n_samples]
    }

    pub fn channel_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.data[c * self.n_samples..(c + 1) * self.n_samples]
    }

    pub fn onset_ms(&self) -> f64 {
        EPOCH_START_MS
    }

    /// Time of sample `k` relative to word onset.
    pub fn time_ms(&self, k: usize) -> f64 {
        time_ms(self.fs, k)
    }

    /// Number of samples before word onset.
    pub fn pre_stimulus_samples(&self) -> usize {
        pre_stimulus_samples(self.fs)
    }

    /// Copy keeping only the listed channels, in the given order.
    pub fn select_channels(&self, channels: &[usize]) -> Epoch {
        let mut data = Vec::with_capacity(channels.len() * self.n_samples);
        for &c in channels {
            data.extend_from_slice(self.channel(c));
        }
        Epoch {
            n_channels: channels.len(),
            data,
            ..self.clone()
        }
    }

    /// Subtract each channel's pre-stimulus mean.
    pub fn baseline_correct(&mut self) {
        let pre = self.pre_stimulus_samples().min(self.n_samples);
        if pre == 0 {
            return;
        }
        for c in 0..self.n_channels {
            let ch = self.channel_mut(c);
            let mean = ch[..pre].iter().sum::<f64>() / pre as f64;
            ch.iter_mut().for_each(|v| *v -= mean);
        }
    }
}

pub fn epoch_samples(fs: f64) -> usize {
    ((EPOCH_END_MS - EPOCH_START_MS) * fs / 1000.0).round() as usize
}

pub fn pre_stimulus_samples(fs: f64) -> usize {
    (-EPOCH_START_MS * fs / 1000.0).round() as usize
}

pub fn time_ms(fs: f64, k: usize) -> f64 {
    EPOCH_START_MS + k as f64 * 1000.0 / fs
}

/// Sample index range `[first, last)` of an epoch covering `[start_ms, end_ms)`.
pub fn window_samples(fs: f64, start_ms: f64, end_ms: f64) -> std::ops::Range<usize> {
    let idx = |t: f64| (((t - EPOCH_START_MS) * fs / 1000.0) - 1e-9).ceil().max(0.0) as usize;
    idx(start_ms)..idx(end_ms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epoch_geometry_at_200_hz() {
        assert_eq!(epoch_samples(200.0), 250);
        assert_eq!(pre_stimulus_samples(200.0), 50);
        assert_eq!(window_samples(200.0, 250.0, 350.0), 100..120);
        assert_eq!(window_samples(200.0, 850.0, 950.0), 220..240);
        assert_eq!(time_ms(200.0, 50), 0.0);
    }

    #[test]
    fn baseline_zeroes_constant_channel() {
        let mut e = Epoch {
            n_channels: 2,
            n_samples: 250,
            fs: 200.0,
            data: (0..500).map(|i| if i < 250 { 3.0 } else { i as f64 * 0.01 }).collect(),
            word: "w".into(),
            block: 1,
            label: Label::Unlabeled,
            doc: None,
        };
        e.baseline_correct();
        assert!(e.channel(0).iter().all(|&v| v == 0.0));
        let pre_mean: f64 = e.channel(1)[..50].iter().sum::<f64>() / 50.0;
        assert!(pre_mean.abs() < 1e-9);
    }
}
