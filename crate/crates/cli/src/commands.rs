use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use neurorel::config::PipelineConfig;
use neurorel::corpus::{corpus_to_jsonl, read_corpus, TermDocumentMatrix};
use neurorel::eeg::erp::average_of_averages;
use neurorel::eeg::io::EpochSet;
use neurorel::eeg::{cut_epochs, epoch_samples, filter, grand_average, reject_artifacts, time_ms, Label, Recording};
use neurorel::evaluation::{
    evaluate_participant, judgments_to_jsonl, run_block as run_held_out, BlockResult, Prepared, ResultRow,
};
use neurorel::simulator::{generate_corpus, simulate_participant, simulate_recording};
use neurorel::stats::mean;
use neurorel::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::dataset::{BlockEntry, Dataset, Manifest, ParticipantEntry, MANIFEST};
use crate::output::{jsonl, write_atomic, Stamp, Stamped};

pub fn log_config(config: &PipelineConfig) {
    log::info!("config hash {} seed {}", config.hash(), config.seed());
    for line in config.resolved().lines() {
        let key = line.split(" = ").next().unwrap_or_default();
        let origin = if config.is_explicit(key) { "" } else { " (default)" };
        log::info!("  {line}{origin}");
    }
}

fn stamp(config: &PipelineConfig) -> Stamp {
    Stamp {
        config_hash: config.hash(),
        seed: config.seed(),
    }
}

/// A path from its flag, else from `paths.<key>`.
fn required(flag: Option<PathBuf>, config: &PipelineConfig, key: &str) -> Result<PathBuf> {
    flag.or_else(|| config.path(key))
        .ok_or_else(|| Error::Config(format!("no {key} path: pass --{key} or set paths.{key}")))
}

fn output_path(flag: Option<PathBuf>, config: &PipelineConfig) -> Result<PathBuf> {
    flag.or_else(|| config.path("output"))
        .ok_or_else(|| Error::Config("no output path: pass --out or set paths.output".into()))
}

fn json_with_stamp(json: &str, stamp: &Stamp) -> Result<Vec<u8>> {
    let mut value: serde_json::Value = serde_json::from_str(json)?;
    if let Some(obj) = value.as_object_mut() {
        obj.insert("config_hash".into(), stamp.config_hash.clone().into());
        obj.insert("seed".into(), stamp.seed.into());
    }
    Ok(serde_json::to_vec(&value)?)
}

pub fn index(config: &PipelineConfig, corpus: Option<PathBuf>, out: Option<PathBuf>) -> Result<()> {
    let corpus = required(corpus, config, "corpus")?;
    let out = output_path(out, config)?;
    let docs = read_corpus(&corpus)?;
    let index = TermDocumentMatrix::build(&docs)?;
    write_atomic(&out, &json_with_stamp(&index.to_json()?, &stamp(config))?)?;
    log::info!("indexed {} documents, {} terms -> {}", index.n_docs(), index.n_terms(), out.display());
    Ok(())
}

pub fn preprocess(config: &PipelineConfig, raw: &Path, out: Option<PathBuf>, report: Option<PathBuf>) -> Result<()> {
    let out = output_path(out, config)?;
    let recording = Recording::load(raw)?;
    let filtered = filter(&recording)?;
    let epochs = cut_epochs(&filtered);
    let cleaned = reject_artifacts(&epochs, &filtered.channel_names)?;
    let set = EpochSet {
        participant: recording.participant.clone(),
        fs: recording.fs,
        channel_names: cleaned.channel_names.clone(),
        n_samples: epoch_samples(recording.fs),
        epochs: cleaned.epochs,
    };
    write_atomic(&out, &set.to_bytes())?;
    let report_path = report.unwrap_or_else(|| {
        let mut name = out.clone().into_os_string();
        name.push(".report.json");
        PathBuf::from(name)
    });
    let stamp = stamp(config);
    let record = Stamped {
        record: &cleaned.report,
        stamp: &stamp,
    };
    write_atomic(&report_path, &serde_json::to_vec_pretty(&record)?)?;
    log::info!(
        "{}: kept {}/{} epochs, {}/{} channels -> {}",
        recording.participant,
        cleaned.report.accepted_epochs,
        cleaned.report.recorded_epochs,
        cleaned.report.accepted_channels,
        cleaned.report.recorded_channels,
        out.display()
    );
    Ok(())
}

pub fn simulate(config: &PipelineConfig, out: Option<PathBuf>, recordings: bool) -> Result<()> {
    let out = output_path(out, config)?;
    let sim = config.simulation();
    let corpus = generate_corpus(&sim)?;
    write_atomic(&out.join("corpus.jsonl"), corpus_to_jsonl(&corpus.documents)?.as_bytes())?;
    write_atomic(&out.join("judgments.jsonl"), judgments_to_jsonl(&corpus.judgments)?.as_bytes())?;
    let mut entries = Vec::new();
    for p in 0..config.participants() {
        let data = simulate_participant(&sim, &corpus, p)?;
        let file = format!("{}.epochs", data.id);
        let set = EpochSet {
            participant: data.id.clone(),
            fs: data.fs,
            channel_names: data.channel_names.clone(),
            n_samples: epoch_samples(data.fs),
            epochs: data.blocks.iter().flat_map(|b| b.epochs.iter().cloned()).collect(),
        };
        write_atomic(&out.join(&file), &set.to_bytes())?;
        if recordings {
            let rec = simulate_recording(&sim, &corpus, p)?;
            let mut buf = Vec::new();
            rec.write_to(&mut buf).map_err(|e| Error::Io { path: out.join(format!("{}.raw", data.id)), source: e })?;
            write_atomic(&out.join(format!("{}.raw", data.id)), &buf)?;
        }
        log::info!("simulated {} ({} epochs)", data.id, set.epochs.len());
        entries.push(ParticipantEntry {
            id: data.id,
            epochs: file,
            blocks: data
                .blocks
                .iter()
                .map(|b| BlockEntry {
                    id: b.id,
                    relevant_doc: b.relevant_doc.clone(),
                    irrelevant_doc: b.irrelevant_doc.clone(),
                })
                .collect(),
        });
    }
    let manifest = Manifest::new(entries, config.hash(), config.seed());
    write_atomic(&out.join(MANIFEST), &serde_json::to_vec_pretty(&manifest)?)?;
    log::info!("dataset written to {}", out.display());
    Ok(())
}

#[derive(Serialize)]
struct PredictionRow<'a> {
    word: &'a str,
    p_relevant: f64,
}

pub fn run_block(
    config: &PipelineConfig,
    dataset: Option<PathBuf>,
    participant: &str,
    block: u32,
    out: Option<PathBuf>,
) -> Result<()> {
    let dataset = Dataset::open(&required(dataset, config, "dataset")?)?;
    let out = output_path(out, config)?;
    let params = config.evaluation();
    let index = TermDocumentMatrix::build(&dataset.corpus()?)?;
    let judgments = dataset.judgments()?;
    let data = dataset.participant(dataset.participant_entry(participant)?)?;
    let b = data
        .blocks
        .iter()
        .position(|x| x.id == block)
        .ok_or_else(|| Error::Config(format!("participant {participant} has no block {block}")))?;
    let prep = Prepared::new(&data, &params.windows)?;
    let outcome = run_held_out(&prep, b, &index, &judgments, &params)?;
    let stamp = stamp(config);

    let predictions = outcome.predictions.iter().map(|(w, p)| Stamped {
        record: PredictionRow { word: w, p_relevant: *p },
        stamp: &stamp,
    });
    write_atomic(&out.join("predictions.jsonl"), &jsonl(predictions)?)?;
    let ranked = outcome.ranked.entries.iter().map(|e| Stamped { record: e, stamp: &stamp });
    write_atomic(&out.join("ranked.jsonl"), &jsonl(ranked)?)?;
    let query = outcome.query.iter().map(|q| Stamped { record: q, stamp: &stamp });
    write_atomic(&out.join("query.jsonl"), &jsonl(query)?)?;
    let row = ResultRow {
        participant: data.id.clone(),
        result: outcome.result,
        config_hash: stamp.config_hash.clone(),
        seed: stamp.seed,
    };
    write_atomic(&out.join("metrics.json"), &serde_json::to_vec_pretty(&row)?)?;
    if outcome.fallback {
        log::warn!("no word predicted relevant; intent built from all read words");
    }
    log::info!(
        "{participant} block {block}: AUC {:?}, CG@30 {}, query {:?}",
        row.result.auc,
        row.result.cg30,
        outcome.query.iter().map(|q| q.term.as_str()).collect::<Vec<_>>()
    );
    Ok(())
}

/// Participant-level line of the summary file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummaryRow {
    pub participant: String,
    pub mean_auc: Option<f64>,
    pub null_mean_auc: Option<f64>,
    pub p_auc: Option<f64>,
    pub mean_cg: f64,
    pub null_mean_cg: f64,
    pub ideal_cg: f64,
    pub p_cg: f64,
    pub depth: usize,
    pub permutations: usize,
    pub config_hash: String,
    pub seed: u64,
}

pub fn evaluate(
    config: &PipelineConfig,
    dataset: Option<PathBuf>,
    out: Option<PathBuf>,
    summary: Option<PathBuf>,
) -> Result<()> {
    let dataset = Dataset::open(&required(dataset, config, "dataset")?)?;
    let out = output_path(out, config)?;
    let summary = summary.unwrap_or_else(|| out.with_file_name("summary.jsonl"));
    let params = config.evaluation();
    let index = TermDocumentMatrix::build(&dataset.corpus()?)?;
    let judgments = dataset.judgments()?;
    let stamp = stamp(config);
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for entry in &dataset.manifest.participants {
        let data = dataset.participant(entry)?;
        let ev = evaluate_participant(&data, &index, &judgments, &params)?;
        let ideal = mean(
            &entry
                .blocks
                .iter()
                .map(|b| judgments.get(&b.relevant_doc).map_or(0.0, |j| j.ideal_gain(params.depth)))
                .collect::<Vec<_>>(),
        );
        log::info!(
            "{}: mean AUC {:?} (p {:?}), mean CG@{} {} (p {})",
            ev.participant,
            ev.mean_auc.as_ref().map(|t| t.observed),
            ev.mean_auc.as_ref().map(|t| t.p),
            params.depth,
            ev.mean_cg.observed,
            ev.mean_cg.p
        );
        summaries.push(SummaryRow {
            participant: ev.participant.clone(),
            mean_auc: ev.mean_auc.as_ref().map(|t| t.observed),
            null_mean_auc: ev.mean_auc.as_ref().map(|t| mean(&t.null)),
            p_auc: ev.mean_auc.as_ref().map(|t| t.p),
            mean_cg: ev.mean_cg.observed,
            null_mean_cg: mean(&ev.mean_cg.null),
            ideal_cg: ideal,
            p_cg: ev.mean_cg.p,
            depth: params.depth,
            permutations: params.permutations,
            config_hash: stamp.config_hash.clone(),
            seed: stamp.seed,
        });
        rows.extend(ev.blocks.into_iter().map(|result| ResultRow {
            participant: ev.participant.clone(),
            result,
            config_hash: stamp.config_hash.clone(),
            seed: stamp.seed,
        }));
    }
    write_atomic(&out, &jsonl(&rows)?)?;
    write_atomic(&summary, &jsonl(&summaries)?)?;
    log::info!("{} result rows -> {}", rows.len(), out.display());
    Ok(())
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.into(), source: e })?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            serde_json::from_str(l).map_err(|e| Error::Malformed {
                path: path.into(),
                record: n + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| mean(&v))
}

fn fmt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x}"))
}

fn csv(header: &str, lines: impl IntoIterator<Item = String>, stamp: &Stamp) -> Vec<u8> {
    let mut out = format!("# config_hash={} seed={}\n{header}\n", stamp.config_hash, stamp.seed);
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out.into_bytes()
}

/// CSV tables: held-out AUC per participant against the permutation null,
/// the brain-minus-random gains, precision with both tf-idf weightings,
/// and cumulative gain per depth; plus grand-average ERP curves when a
/// dataset is given.
pub fn report(
    config: &PipelineConfig,
    results: &Path,
    summary: Option<PathBuf>,
    dataset: Option<PathBuf>,
    channel: &str,
    out: Option<PathBuf>,
) -> Result<()> {
    let out = output_path(out, config)?;
    let rows: Vec<ResultRow> = read_jsonl(results)?;
    let summary_path = summary.unwrap_or_else(|| results.with_file_name("summary.jsonl"));
    let summaries: Vec<SummaryRow> = read_jsonl(&summary_path)?;
    let stamp = rows.first().map_or_else(|| stamp(config), |r| Stamp {
        config_hash: r.config_hash.clone(),
        seed: r.seed,
    });
    let mut by_participant: BTreeMap<&str, Vec<&BlockResult>> = BTreeMap::new();
    for r in &rows {
        by_participant.entry(&r.participant).or_default().push(&r.result);
    }

    let fig4 = summaries.iter().map(|s| {
        format!("{},{},{},{}", s.participant, fmt(s.mean_auc), fmt(s.null_mean_auc), fmt(s.p_auc))
    });
    write_atomic(&out.join("fig4_auc.csv"), &csv("participant,auc,random_feedback_auc,p", fig4, &stamp))?;

    let fig5 = summaries.iter().map(|s| {
        let auc_gain = s.mean_auc.zip(s.null_mean_auc).map(|(a, b)| a - b);
        let cg_gain = (s.ideal_cg > 0.0).then(|| (s.mean_cg - s.null_mean_cg) / s.ideal_cg);
        format!("{},{},{}", s.participant, fmt(auc_gain), fmt(cg_gain))
    });
    write_atomic(&out.join("fig5_gain.csv"), &csv("participant,auc_gain,normalized_cg_gain", fig5, &stamp))?;

    let fig6 = by_participant.iter().map(|(p, blocks)| {
        format!(
            "{p},{},{},{}",
            fmt(mean_of(blocks.iter().map(|b| b.precision))),
            fmt(mean_of(blocks.iter().map(|b| b.weighted_precision_rel))),
            fmt(mean_of(blocks.iter().map(|b| b.weighted_precision_irr)))
        )
    });
    write_atomic(
        &out.join("fig6_precision.csv"),
        &csv("participant,precision,weighted_precision_relevant_doc,weighted_precision_irrelevant_doc", fig6, &stamp),
    )?;

    let p_cg: BTreeMap<&str, f64> = summaries.iter().map(|s| (s.participant.as_str(), s.p_cg)).collect();
    let fig7 = by_participant.iter().map(|(p, blocks)| {
        let m = |f: fn(&BlockResult) -> f64| mean(&blocks.iter().map(|b| f(b)).collect::<Vec<_>>());
        format!("{p},{},{},{},{}", m(|b| b.cg10), m(|b| b.cg20), m(|b| b.cg30), fmt(p_cg.get(p).copied()))
    });
    write_atomic(&out.join("fig7_cg.csv"), &csv("participant,cg10,cg20,cg30,p", fig7, &stamp))?;

    if let Some(dir) = dataset {
        let dataset = Dataset::open(&dir)?;
        let mut rel = Vec::new();
        let mut irr = Vec::new();
        let mut channel_index = None;
        for entry in &dataset.manifest.participants {
            let data = dataset.participant(entry)?;
            let c = data
                .channel_names
                .iter()
                .position(|n| n == channel)
                .ok_or_else(|| Error::Config(format!("participant {} has no channel {channel}", data.id)))?;
            channel_index = Some(c);
            let epochs: Vec<_> = data.blocks.into_iter().flat_map(|b| b.epochs).collect();
            rel.push(grand_average(&epochs, Label::Relevant)?);
            irr.push(grand_average(&epochs, Label::Irrelevant)?);
        }
        if let Some(c) = channel_index {
            let (rel, irr) = (average_of_averages(&rel)?, average_of_averages(&irr)?);
            let lines = (0..rel.n_samples).map(|k| {
                let (r, i) = (rel.channel(c)[k], irr.channel(c)[k]);
                format!("{},{r},{i},{}", time_ms(rel.fs, k), r - i)
            });
            write_atomic(
                &out.join(format!("erp_{channel}.csv")),
                &csv("time_ms,relevant,irrelevant,difference", lines, &stamp),
            )?;
        }
    }
    log::info!("report tables -> {}", out.display());
    Ok(())
}
