use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SMALL: [&str; 4] = ["--set", "simulation.participants=2", "--set", "evaluation.permutations=5"];

fn neurorel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_neurorel"))
        .args(args)
        .env("RUST_LOG", "info")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = neurorel(args);
    assert!(
        out.status.success(),
        "{args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn simulate(dir: &Path, extra: &[&str]) {
    let mut args = vec!["simulate", "--out", path(dir)];
    args.extend_from_slice(extra);
    args.extend_from_slice(&SMALL);
    ok(&args);
}

fn evaluate(dataset: &Path, results: &Path) {
    let mut args = vec!["evaluate", "--dataset", path(dataset), "--out", path(results)];
    args.extend_from_slice(&SMALL);
    ok(&args);
}

#[test]
fn simulate_then_evaluate_writes_one_row_per_block() {
    let tmp = TempDir::new().unwrap();
    let data = tmp.path().join("data");
    simulate(&data, &[]);
    for f in ["corpus.jsonl", "judgments.jsonl", "dataset.json", "P01.epochs", "P02.epochs"] {
        assert!(data.join(f).exists(), "missing {f}");
    }
    let results = tmp.path().join("out/results.jsonl");
    evaluate(&data, &results);
    let text = fs::read_to_string(&results).unwrap();
    let rows: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 16);
    for row in &rows {
        for key in ["participant", "block", "auc", "cg30", "p_class", "config_hash", "seed"] {
            assert!(row.get(key).is_some(), "row lacks {key}: {row}");
        }
    }
    let summary = fs::read_to_string(tmp.path().join("out/summary.jsonl")).unwrap();
    assert_eq!(summary.lines().count(), 2);
}

#[test]
fn same_seed_gives_identical_results() {
    let tmp = TempDir::new().unwrap();
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let data = tmp.path().join(run);
        simulate(&data, &[]);
        let results = tmp.path().join(format!("{run}.jsonl"));
        evaluate(&data, &results);
        outputs.push(fs::read(&results).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn resolved_configuration_is_logged_with_defaults_marked() {
    let tmp = TempDir::new().unwrap();
    let out = ok(&["simulate", "--out", path(tmp.path()), "--set", "simulation.participants=1"]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("retrieval.mu = 2000.0 (default)"), "{stderr}");
    assert!(stderr.contains("simulation.participants = 1"), "{stderr}");
    assert!(!stderr.contains("simulation.participants = 1 (default)"), "{stderr}");
    assert!(stderr.contains("config hash"), "{stderr}");
}

fn assert_json_error(out: &Output) -> serde_json::Value {
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().last().expect("an error line");
    let v: serde_json::Value = serde_json::from_str(line).unwrap_or_else(|_| panic!("not JSON: {line}"));
    assert!(v["error"].is_string() && v["message"].is_string(), "{v}");
    v
}

#[test]
fn failures_exit_nonzero_with_a_json_error_line() {
    let tmp = TempDir::new().unwrap();
    assert_json_error(&neurorel(&["evaluate", "--dataset", path(&tmp.path().join("nowhere"))]));
    assert_json_error(&neurorel(&["simulate", "--out", path(tmp.path()), "--set", "retrieval.mu=-1"]));
    assert_json_error(&neurorel(&["simulate", "--out", path(tmp.path()), "--set", "no.such.key=1"]));
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "retrieval.mu = \"lots\"\n").unwrap();
    assert_json_error(&neurorel(&["simulate", "--config", path(&bad), "--out", path(tmp.path())]));
}

#[test]
fn config_file_and_overrides_stack() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "seed = 7\n\"simulation.participants\" = 3\n").unwrap();
    let out = ok(&["simulate", "--config", path(&cfg), "--out", path(&tmp.path().join("d")), "--set", "seed=8"]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("seed = 8"), "{stderr}");
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("d/dataset.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 8);
    assert_eq!(manifest["participants"].as_array().unwrap().len(), 3);
}

#[test]
fn every_subcommand_runs_end_to_end() {
    let tmp = TempDir::new().unwrap();
    let data = tmp.path().join("data");
    simulate(&data, &["--recordings"]);

    let index = tmp.path().join("index.json");
    ok(&["index", "--corpus", path(&data.join("corpus.jsonl")), "--out", path(&index)]);
    let idx: serde_json::Value = serde_json::from_str(&fs::read_to_string(&index).unwrap()).unwrap();
    assert!(idx.get("config_hash").is_some());

    let cleaned = tmp.path().join("P01.clean.epochs");
    ok(&["preprocess", "--raw", path(&data.join("P01.raw")), "--out", path(&cleaned)]);
    assert!(cleaned.exists());
    let report: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(tmp.path().join("P01.clean.epochs.report.json")).unwrap(),
    )
    .unwrap();
    assert!(report["accepted_epochs"].as_u64().unwrap() > 0);

    let block = tmp.path().join("block");
    let mut args = vec!["run-block", "--dataset", path(&data), "--participant", "P01", "--block", "3", "--out", path(&block)];
    args.extend_from_slice(&SMALL);
    ok(&args);
    for f in ["predictions.jsonl", "ranked.jsonl", "query.jsonl", "metrics.json"] {
        assert!(block.join(f).exists(), "missing {f}");
    }
    assert_eq!(fs::read_to_string(block.join("ranked.jsonl")).unwrap().lines().count(), 30);

    let results = tmp.path().join("eval/results.jsonl");
    evaluate(&data, &results);
    let figures = tmp.path().join("figures");
    ok(&["report", "--results", path(&results), "--dataset", path(&data), "--out", path(&figures)]);
    for f in ["fig4_auc.csv", "fig5_gain.csv", "fig6_precision.csv", "fig7_cg.csv", "erp_Pz.csv"] {
        let text = fs::read_to_string(figures.join(f)).unwrap_or_else(|_| panic!("missing {f}"));
        assert!(text.starts_with("# config_hash="), "{f}");
    }

    let missing = neurorel(&["run-block", "--dataset", path(&data), "--participant", "P09", "--block", "1"]);
    assert_json_error(&missing);
}
