use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::types::{window_samples, Epoch, Label};

/// Equidistant post-stimulus averaging windows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureWindows {
    pub count: usize,
    pub start_ms: f64,
    pub end_ms: f64,
}

impl Default for FeatureWindows {
    fn default() -> Self {
        Self {
            count: 7,
            start_ms: 250.0,
            end_ms: 950.0,
        }
    }
}

impl FeatureWindows {
    pub fn bounds(&self, w: usize) -> (f64, f64) {
        let width = (self.end_ms - self.start_ms) / self.count as f64;
        (
            self.start_ms + w as f64 * width,
            self.start_ms + (w + 1) as f64 * width,
        )
    }
}

/// Spatio-temporal features, one row per epoch. Column `c * windows + w`
/// holds the mean potential of channel `c` in window `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub data: DMatrix<f64>,
    pub labels: Vec<Label>,
    pub blocks: Vec<u32>,
    pub words: Vec<String>,
    pub docs: Vec<Option<String>>,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.data.ncols()
    }

    pub fn relevant_mask(&self) -> Vec<bool> {
        self.labels.iter().map(|l| l.is_relevant()).collect()
    }

    /// Rows whose index satisfies `keep`.
    pub fn select_rows(&self, keep: impl Fn(usize) -> bool) -> FeatureMatrix {
        let idx: Vec<usize> = (0..self.n_rows()).filter(|&i| keep(i)).collect();
        FeatureMatrix {
            data: self.data.select_rows(idx.iter()),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            blocks: idx.iter().map(|&i| self.blocks[i]).collect(),
            words: idx.iter().map(|&i| self.words[i].clone()).collect(),
            docs: idx.iter().map(|&i| self.docs[i].clone()).collect(),
        }
    }
}

/// Window means of one epoch, channel-major.
pub fn epoch_features(epoch: &Epoch, windows: &FeatureWindows) -> Vec<f64> {
    let ranges: Vec<_> = (0..windows.count)
        .map(|w| {
            let (a, b) = windows.bounds(w);
            window_samples(epoch.fs, a, b)
        })
        .collect();
    let mut out = Vec::with_capacity(epoch.n_channels * windows.count);
    for c in 0..epoch.n_channels {
        let ch = epoch.channel(c);
        for r in &ranges {
            let slice = &ch[r.start.min(ch.len())..r.end.min(ch.len())];
            out.push(slice.iter().sum::<f64>() / slice.len().max(1) as f64);
        }
    }
    out
}

/// Stack epoch features into a matrix. All epochs must share the channel set.
pub fn extract_features(epochs: &[Epoch], windows: &FeatureWindows) -> FeatureMatrix {
    let d = epochs.first().map_or(0, |e| e.n_channels * windows.count);
    let mut data = DMatrix::zeros(epochs.len(), d);
    for (i, e) in epochs.iter().enumerate() {
        let row = epoch_features(e, windows);
        assert_eq!(row.len(), d, "epochs must share one channel set");
        for (j, v) in row.into_iter().enumerate() {
            data[(i, j)] = v;
        }
    }
    FeatureMatrix {
        data,
        labels: epochs.iter().map(|e| e.label).collect(),
        blocks: epochs.iter().map(|e| e.block).collect(),
        words: epochs.iter().map(|e| e.word.clone()).collect(),
        docs: epochs.iter().map(|e| e.doc.clone()).collect(),
    }
}
