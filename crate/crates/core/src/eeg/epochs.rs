use log::warn;

use super::types::{epoch_samples, pre_stimulus_samples, Epoch, Recording, StimulusKind};

/// Cut one baseline-corrected epoch per word event. Separator events are
/// skipped, as are events whose window falls outside the recording.
pub fn cut_epochs(recording: &Recording) -> Vec<Epoch> {
    let fs = recording.fs;
    let len = epoch_samples(fs);
    let pre = pre_stimulus_samples(fs);
    let total = recording.n_samples();
    let n_channels = recording.data.len();

    let mut epochs = Vec::new();
    for event in &recording.events {
        if event.kind == StimulusKind::Separator {
            continue;
        }
        if event.sample < pre || event.sample - pre + len > total {
            warn!(
                "skipping event {:?} at sample {}: epoch exceeds recording bounds",
                event.word, event.sample
            );
            continue;
        }
        let start = event.sample - pre;
        let mut data = Vec::with_capacity(n_channels * len);
        for ch in &recording.data {
            data.extend_from_slice(&ch[start..start + len]);
        }
        let mut epoch = Epoch {
            n_channels,
            n_samples: len,
            fs,
            data,
            word: event.word.clone(),
            block: event.block,
            label: event.label,
            doc: event.doc.clone(),
        };
        epoch.baseline_correct();
        epochs.push(epoch);
    }
    epochs
}
