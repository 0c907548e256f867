use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, Exp, Normal};

use super::{SimulatedCorpus, SimulationConfig, Topic};
use crate::corpus::term_of;
use crate::eeg::erp::{N400_WINDOW, P600_WINDOW};
use crate::eeg::{epoch_samples, pre_stimulus_samples, time_ms, Epoch, Event, Label, Recording, StimulusKind};
use crate::error::Result;
use crate::evaluation::{ExperimentBlock, ParticipantData};
use crate::rng::{Rng, SeedTree};

/// Stimulus onset asynchrony between consecutive words.
const SOA_MS: f64 = 700.0;
const SEPARATOR: &str = "&&&&&&";
const BLINK_UV: f64 = 60.0;
const BLINK_MS: f64 = 300.0;

/// Raised-cosine bump of height `amp` spanning `[start, end)` ms.
fn bump(t_ms: f64, (start, end): (f64, f64), amp: f64) -> f64 {
    if t_ms < start || t_ms >= end {
        return 0.0;
    }
    amp * 0.5 * (1.0 - (2.0 * PI * (t_ms - start) / (end - start)).cos())
}

/// Noise-free epoch for a label: an N400-window negativity for irrelevant
/// words or a P600-window positivity for relevant words, on the affected
/// channels only. Row-major `n_channels × n_samples`.
pub fn template(label: Label, config: &SimulationConfig) -> Vec<f64> {
    let n = epoch_samples(config.fs);
    let mut data = vec![0.0; config.n_channels * n];
    let (window, amp) = match label {
        Label::Relevant => (P600_WINDOW, config.p600_amp),
        Label::Irrelevant => (N400_WINDOW, -config.n400_amp),
        Label::Unlabeled => return data,
    };
    for &c in &config.affected_channels {
        for k in 0..n {
            data[c * n + k] = bump(time_ms(config.fs, k), window, amp);
        }
    }
    data
}

/// Template plus white Gaussian noise, baseline-corrected.
pub fn generate_epoch(label: Label, config: &SimulationConfig, rng: &mut Rng) -> Epoch {
    let noise = Normal::new(0.0, config.noise_sd).expect("validated noise level");
    let mut data = template(label, config);
    for v in &mut data {
        *v += noise.sample(rng);
    }
    let mut epoch = Epoch {
        n_channels: config.n_channels,
        n_samples: epoch_samples(config.fs),
        fs: config.fs,
        data,
        word: String::new(),
        block: 0,
        label,
        doc: None,
    };
    epoch.baseline_correct();
    epoch
}

/// One presented word: text, label and source document.
#[derive(Debug, Clone)]
struct Stimulus {
    word: String,
    label: Label,
    doc: String,
}

/// Topic pairs per block and the word stream of every block. Trial `t`
/// shows sentence `t` of both reading documents in random order.
fn reading_plan(config: &SimulationConfig, corpus: &SimulatedCorpus, seeds: &SeedTree) -> Vec<(usize, usize, Vec<Vec<Stimulus>>)> {
    let mut order: Vec<usize> = (0..corpus.topics.len()).collect();
    order.shuffle(&mut seeds.child("topics").rng());
    (0..config.n_blocks)
        .map(|b| {
            let (rel, irr) = (order[2 * b], order[2 * b + 1]);
            let relevant: &Topic = &corpus.topics[rel];
            let relevant_terms = relevant.term_set();
            let mut rng = seeds.child("trial-order").index(b as u64).rng();
            let trials = (0..config.trials_per_block)
                .map(|t| {
                    let mut pair = [rel, irr];
                    if rng.random_bool(0.5) {
                        pair.swap(0, 1);
                    }
                    pair.iter()
                        .flat_map(|&topic| {
                            let src = &corpus.topics[topic];
                            let sentence = &src.reading_sentences[t % src.reading_sentences.len()];
                            sentence.iter().map(|w| Stimulus {
                                word: w.clone(),
                                label: match term_of(w) {
                                    Some(term) if relevant_terms.contains(term.as_str()) => Label::Relevant,
                                    _ => Label::Irrelevant,
                                },
                                doc: src.reading_doc.clone(),
                            })
                        })
                        .collect()
                })
                .collect();
            (rel, irr, trials)
        })
        .collect()
}

fn participant_seeds(config: &SimulationConfig, participant: usize) -> SeedTree {
    SeedTree::new(config.seed).child("participant").index(participant as u64)
}

fn participant_id(participant: usize) -> String {
    format!("P{:02}", participant + 1)
}

/// Reading blocks of one participant with generated epochs. Block `b`
/// pairs a relevant and an irrelevant topic (each topic read at most once)
/// and labels a word relevant iff its term belongs to the relevant topic.
pub fn simulate_participant(config: &SimulationConfig, corpus: &SimulatedCorpus, participant: usize) -> Result<ParticipantData> {
    config.validate()?;
    let seeds = participant_seeds(config, participant);
    let blocks = reading_plan(config, corpus, &seeds)
        .into_iter()
        .enumerate()
        .map(|(b, (rel, irr, trials))| {
            let mut rng = seeds.child("epochs").index(b as u64).rng();
            let epochs = trials
                .iter()
                .flatten()
                .map(|s| {
                    let mut e = generate_epoch(s.label, config, &mut rng);
                    e.word = s.word.clone();
                    e.block = b as u32 + 1;
                    e.doc = Some(s.doc.clone());
                    e
                })
                .collect();
            ExperimentBlock {
                id: b as u32 + 1,
                relevant_doc: corpus.topics[rel].reading_doc.clone(),
                irrelevant_doc: corpus.topics[irr].reading_doc.clone(),
                epochs,
            }
        })
        .collect();
    Ok(ParticipantData {
        id: participant_id(participant),
        channel_names: config.channel_names(),
        fs: config.fs,
        blocks,
    })
}

/// Continuous recording of the same reading session: words every 700 ms,
/// a separator after each sentence, white noise throughout, the label's
/// template added at each word onset and, when configured, blink-like
/// transients on every channel.
pub fn simulate_recording(config: &SimulationConfig, corpus: &SimulatedCorpus, participant: usize) -> Result<Recording> {
    config.validate()?;
    let seeds = participant_seeds(config, participant);
    let fs = config.fs;
    let soa = (SOA_MS * fs / 1000.0).round() as usize;
    let pre = pre_stimulus_samples(fs);
    let span = epoch_samples(fs);

    let mut events = Vec::new();
    let mut cursor = 2 * pre;
    for (b, (_, _, trials)) in reading_plan(config, corpus, &seeds).into_iter().enumerate() {
        for trial in trials {
            let mut last_doc = None;
            for s in trial {
                if last_doc.as_ref().is_some_and(|d| d != &s.doc) {
                    events.push(Event {
                        sample: cursor,
                        word: SEPARATOR.into(),
                        block: b as u32 + 1,
                        kind: StimulusKind::Separator,
                        label: Label::Unlabeled,
                        doc: None,
                    });
                    cursor += soa;
                }
                last_doc = Some(s.doc.clone());
                events.push(Event {
                    sample: cursor,
                    word: s.word,
                    block: b as u32 + 1,
                    kind: StimulusKind::Word,
                    label: s.label,
                    doc: Some(s.doc),
                });
                cursor += soa;
            }
            events.push(Event {
                sample: cursor,
                word: SEPARATOR.into(),
                block: b as u32 + 1,
                kind: StimulusKind::Separator,
                label: Label::Unlabeled,
                doc: None,
            });
            cursor += soa;
        }
    }
    let n_samples = cursor + span;

    let mut rng = seeds.child("recording").rng();
    let noise = Normal::new(0.0, config.noise_sd).expect("validated noise level");
    let mut data: Vec<Vec<f64>> =
        (0..config.n_channels).map(|_| (0..n_samples).map(|_| noise.sample(&mut rng)).collect()).collect();

    let templates = [Label::Relevant, Label::Irrelevant].map(|l| template(l, config));
    for e in events.iter().filter(|e| e.kind == StimulusKind::Word) {
        let t = &templates[usize::from(e.label != Label::Relevant)];
        let start = e.sample - pre;
        for (c, ch) in data.iter_mut().enumerate() {
            for k in 0..span {
                ch[start + k] += t[c * span + k];
            }
        }
    }

    if config.blink_rate_hz > 0.0 {
        let gap = Exp::new(config.blink_rate_hz).expect("positive rate");
        let width = (BLINK_MS * fs / 1000.0).round() as usize;
        let mut t = gap.sample(&mut rng);
        loop {
            let start = (t * fs) as usize;
            if start + width >= n_samples {
                break;
            }
            for ch in &mut data {
                for k in 0..width {
                    ch[start + k] += bump(k as f64, (0.0, width as f64), BLINK_UV);
                }
            }
            t += gap.sample(&mut rng);
        }
    }

    Ok(Recording {
        participant: participant_id(participant),
        channel_names: config.channel_names(),
        fs,
        data,
        events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::generate_corpus;

    #[test]
    fn zero_noise_limit_is_the_template() {
        let config = SimulationConfig {
            noise_sd: 1e-300,
            ..SimulationConfig::default()
        };
        let mut rng = SeedTree::new(1).rng();
        for label in [Label::Relevant, Label::Irrelevant] {
            let e = generate_epoch(label, &config, &mut rng);
            let t = template(label, &config);
            let err = e.data.iter().zip(&t).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-250, "{err}");
        }
    }

    #[test]
    fn template_peaks_where_expected() {
        let config = SimulationConfig::default();
        let n = epoch_samples(config.fs);
        let rel = template(Label::Relevant, &config);
        let k = |ms: f64| ((ms + 250.0) * config.fs / 1000.0) as usize;
        assert!((rel[7 * n + k(675.0)] - 1.0).abs() < 1e-12);
        assert_eq!(rel[k(675.0)], 0.0, "unaffected channel");
        let irr = template(Label::Irrelevant, &config);
        assert!((irr[2 * n + k(425.0)] + 0.8).abs() < 1e-12);
    }

    #[test]
    fn participant_structure() {
        let config = SimulationConfig::default();
        let corpus = generate_corpus(&config).unwrap();
        let p = simulate_participant(&config, &corpus, 0).unwrap();
        assert_eq!(p.blocks.len(), 8);
        let mut docs = std::collections::BTreeSet::new();
        for b in &p.blocks {
            assert!(docs.insert(b.relevant_doc.clone()) && docs.insert(b.irrelevant_doc.clone()));
            assert_eq!(b.epochs.len(), 6 * 2 * 9);
            for e in &b.epochs {
                let d = e.doc.as_deref().unwrap();
                assert!(d == b.relevant_doc || d == b.irrelevant_doc);
                if d == b.irrelevant_doc {
                    assert_eq!(e.label, Label::Irrelevant);
                }
            }
        }
        let total: usize = p.blocks.iter().map(|b| b.epochs.len()).sum();
        let relevant: usize = p.blocks.iter().flat_map(|b| &b.epochs).filter(|e| e.label.is_relevant()).count();
        assert!(relevant * 3 < total, "{relevant} of {total}");
        assert_eq!(p, simulate_participant(&config, &corpus, 0).unwrap());
        assert_ne!(p.blocks[0].epochs[0].data, simulate_participant(&config, &corpus, 1).unwrap().blocks[0].epochs[0].data);
    }

    #[test]
    fn recording_events_match_participant_words() {
        let config = SimulationConfig::default();
        let corpus = generate_corpus(&config).unwrap();
        let rec = simulate_recording(&config, &corpus, 0).unwrap();
        let p = simulate_participant(&config, &corpus, 0).unwrap();
        let words: Vec<&str> = rec.events.iter().filter(|e| e.kind == StimulusKind::Word).map(|e| e.word.as_str()).collect();
        let expected: Vec<&str> = p.blocks.iter().flat_map(|b| &b.epochs).map(|e| e.word.as_str()).collect();
        assert_eq!(words, expected);
        assert!(rec.events.iter().any(|e| e.kind == StimulusKind::Separator));
        assert!(rec.events.iter().all(|e| e.sample + 200 <= rec.n_samples()));
    }
}
