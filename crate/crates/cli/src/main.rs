//! `neurorel` — run the brain-relevance pipeline from the command line.
//!
//! Every subcommand resolves the configuration first (defaults, then
//! `--config`, then `--set key=value`), logs it with its hash and seed, and
//! only then touches data. Failures exit nonzero with one JSON line on
//! stderr: `{"error":"<kind>","message":"..."}`.

mod commands;
mod dataset;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use neurorel::config::PipelineConfig;

#[derive(Debug, Parser)]
#[command(name = "neurorel", version, about = "Brain-relevance feedback pipeline: EEG term relevance, LinRel intent, retrieval")]
struct Cli {
    /// TOML configuration file with flat dotted keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one configuration key, e.g. `--set retrieval.mu=1000`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the tf-idf index of a JSONL corpus.
    Index {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Filter, epoch and clean a raw recording.
    Preprocess {
        #[arg(long)]
        raw: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Rejection report (JSON); defaults to `<out>.report.json`.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Hold out one block: predict, model intent, retrieve, score.
    RunBlock {
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        participant: String,
        #[arg(long)]
        block: u32,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Leave-one-block-out evaluation with permutation tests.
    Evaluate {
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Results file (JSONL, one row per participant and block).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Participant summary; defaults to `summary.jsonl` beside `out`.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Generate a synthetic dataset.
    Simulate {
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write continuous recordings (`<participant>.raw`).
        #[arg(long)]
        recordings: bool,
    },
    /// Per-participant CSV tables and ERP plot data.
    Report {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Dataset for grand-average ERP curves.
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Channel for the ERP curves.
        #[arg(long, default_value = "Pz")]
        channel: String,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> neurorel::Result<()> {
    let config = PipelineConfig::load(cli.config.as_deref(), &cli.overrides)?;
    commands::log_config(&config);
    match cli.command {
        Command::Index { corpus, out } => commands::index(&config, corpus, out),
        Command::Preprocess { raw, out, report } => commands::preprocess(&config, &raw, out, report),
        Command::RunBlock {
            dataset,
            participant,
            block,
            out,
        } => commands::run_block(&config, dataset, &participant, block, out),
        Command::Evaluate { dataset, out, summary } => commands::evaluate(&config, dataset, out, summary),
        Command::Simulate { out, recordings } => commands::simulate(&config, out, recordings),
        Command::Report {
            results,
            summary,
            dataset,
            channel,
            out,
        } => commands::report(&config, &results, summary, dataset, &channel, out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{line}");
            ExitCode::FAILURE
        }
    }
}
