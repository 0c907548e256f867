//! Pipeline configuration: flat dotted keys (`intent.lambda = 0.5`) read
//! from a TOML file and overridden by `key=value` pairs. Every key has a
//! default; unknown keys and ill-typed values are rejected before any work
//! starts.
//!
//! The resolved configuration is rendered as sorted `key = value` lines.
//! Its SHA-256 over every non-path key is the config hash embedded in
//! outputs; paths only say where things live and do not enter the hash.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use toml::Value;

use crate::classifier::Shrinkage;
use crate::eeg::FeatureWindows;
use crate::error::{Error, Result};
use crate::evaluation::EvaluationParams;
use crate::intent::LinRelParams;
use crate::simulator::SimulationConfig;

/// Value kinds a key accepts.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Int,
    Float,
    Str,
    IntList,
    /// `"analytic"` or a number in `[0, 1]`.
    Shrinkage,
}

fn defaults() -> Vec<(&'static str, Kind, Value)> {
    let sim = SimulationConfig::default();
    let eval = EvaluationParams::default();
    let int = |v: usize| Value::Integer(v as i64);
    vec![
        ("seed", Kind::Int, Value::Integer(0)),
        ("paths.corpus", Kind::Str, Value::String(String::new())),
        ("paths.dataset", Kind::Str, Value::String(String::new())),
        ("paths.output", Kind::Str, Value::String(String::new())),
        ("features.windows", Kind::Int, int(eval.windows.count)),
        ("features.start_ms", Kind::Float, Value::Float(eval.windows.start_ms)),
        ("features.end_ms", Kind::Float, Value::Float(eval.windows.end_ms)),
        ("classifier.shrinkage", Kind::Shrinkage, Value::String("analytic".into())),
        ("intent.lambda", Kind::Float, Value::Float(eval.linrel.lambda)),
        ("intent.c", Kind::Float, Value::Float(eval.linrel.c)),
        ("intent.m_terms", Kind::Int, int(eval.m_terms)),
        ("retrieval.mu", Kind::Float, Value::Float(eval.mu)),
        ("retrieval.k", Kind::Int, int(eval.depth)),
        ("evaluation.permutations", Kind::Int, int(eval.permutations)),
        ("simulation.participants", Kind::Int, int(1)),
        ("simulation.n_channels", Kind::Int, int(sim.n_channels)),
        ("simulation.fs", Kind::Float, Value::Float(sim.fs)),
        ("simulation.n_blocks", Kind::Int, int(sim.n_blocks)),
        ("simulation.trials_per_block", Kind::Int, int(sim.trials_per_block)),
        ("simulation.noise_sd", Kind::Float, Value::Float(sim.noise_sd)),
        ("simulation.n400_amp", Kind::Float, Value::Float(sim.n400_amp)),
        ("simulation.p600_amp", Kind::Float, Value::Float(sim.p600_amp)),
        (
            "simulation.affected_channels",
            Kind::IntList,
            Value::Array(sim.affected_channels.iter().map(|&c| int(c)).collect()),
        ),
        ("simulation.n_topics", Kind::Int, int(sim.n_topics)),
        ("simulation.docs_per_topic", Kind::Int, int(sim.docs_per_topic)),
        ("simulation.terms_per_topic", Kind::Int, int(sim.terms_per_topic)),
        ("simulation.filler_words", Kind::Int, int(sim.filler_words)),
        ("simulation.blink_rate_hz", Kind::Float, Value::Float(sim.blink_rate_hz)),
    ]
}

/// Coerce `value` to `kind`, or explain why it cannot be.
fn coerce(key: &str, kind: Kind, value: Value) -> Result<Value> {
    let fail = |v: &Value| Err(Error::Config(format!("{key}: expected {kind:?}, got {v}")));
    match (kind, value) {
        (Kind::Int, Value::Integer(i)) if i >= 0 => Ok(Value::Integer(i)),
        (Kind::Float, Value::Integer(i)) => Ok(Value::Float(i as f64)),
        (Kind::Float, Value::Float(f)) => Ok(Value::Float(f)),
        (Kind::Str, Value::String(s)) => Ok(Value::String(s)),
        (Kind::IntList, Value::Array(items)) => {
            if items.iter().all(|v| matches!(v, Value::Integer(i) if *i >= 0)) {
                Ok(Value::Array(items))
            } else {
                fail(&Value::Array(items))
            }
        }
        (Kind::Shrinkage, Value::String(s)) if s == "analytic" => Ok(Value::String(s)),
        (Kind::Shrinkage, Value::Integer(i)) => Ok(Value::Float(i as f64)),
        (Kind::Shrinkage, Value::Float(f)) => Ok(Value::Float(f)),
        (_, v) => fail(&v),
    }
}

fn flatten(prefix: &str, table: toml::Table, out: &mut Vec<(String, Value)>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k } else { format!("{prefix}.{k}") };
        match v {
            Value::Table(t) => flatten(&key, t, out),
            v => out.push((key, v)),
        }
    }
}

/// Parse the right-hand side of `key=value`: a TOML value if it parses as
/// one, otherwise a bare string.
fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    values: BTreeMap<String, Value>,
    /// Keys given explicitly by a file or override.
    explicit: Vec<String>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            values: defaults().into_iter().map(|(k, _, v)| (k.to_string(), v)).collect(),
            explicit: Vec::new(),
        }
    }
}

impl PipelineConfig {
    /// Defaults, then the file (if any), then `key=value` overrides.
    pub fn load(file: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut config = Self::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let table: toml::Table =
                text.parse().map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let mut pairs = Vec::new();
            flatten("", table, &mut pairs);
            for (k, v) in pairs {
                config.set(&k, v)?;
            }
        }
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override {o:?} is not key=value")))?;
            config.set(k.trim(), parse_value(v.trim()))?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn set(&mut self, key: &str, value: Value) -> Result<()> {
        let (_, kind, _) = defaults()
            .into_iter()
            .find(|(k, _, _)| *k == key)
            .ok_or_else(|| Error::Config(format!("unknown config key {key:?}")))?;
        let v = coerce(key, kind, value)?;
        self.values.insert(key.to_string(), v);
        if !self.explicit.iter().any(|k| k == key) {
            self.explicit.push(key.to_string());
        }
        Ok(())
    }

    /// Whether `key` came from the file or an override rather than a default.
    pub fn is_explicit(&self, key: &str) -> bool {
        self.explicit.iter().any(|k| k == key)
    }

    fn int(&self, key: &str) -> usize {
        self.values[key].as_integer().expect("validated integer") as usize
    }

    fn float(&self, key: &str) -> f64 {
        self.values[key].as_float().expect("validated float")
    }

    fn string(&self, key: &str) -> &str {
        self.values[key].as_str().expect("validated string")
    }

    pub fn seed(&self) -> u64 {
        self.values["seed"].as_integer().expect("validated integer") as u64
    }

    /// A path key, or `None` when unset.
    pub fn path(&self, key: &str) -> Option<PathBuf> {
        let key = format!("paths.{key}");
        self.values.contains_key(&key).then(|| self.string(&key)).filter(|s| !s.is_empty()).map(PathBuf::from)
    }

    pub fn shrinkage(&self) -> Shrinkage {
        match &self.values["classifier.shrinkage"] {
            Value::Float(f) => Shrinkage::Fixed(*f),
            _ => Shrinkage::Analytic,
        }
    }

    pub fn evaluation(&self) -> EvaluationParams {
        EvaluationParams {
            shrinkage: self.shrinkage(),
            windows: FeatureWindows {
                count: self.int("features.windows"),
                start_ms: self.float("features.start_ms"),
                end_ms: self.float("features.end_ms"),
            },
            linrel: LinRelParams {
                lambda: self.float("intent.lambda"),
                c: self.float("intent.c"),
            },
            m_terms: self.int("intent.m_terms"),
            mu: self.float("retrieval.mu"),
            depth: self.int("retrieval.k"),
            permutations: self.int("evaluation.permutations"),
            seed: self.seed(),
        }
    }

    pub fn simulation(&self) -> SimulationConfig {
        SimulationConfig {
            n_channels: self.int("simulation.n_channels"),
            fs: self.float("simulation.fs"),
            n_blocks: self.int("simulation.n_blocks"),
            trials_per_block: self.int("simulation.trials_per_block"),
            noise_sd: self.float("simulation.noise_sd"),
            n400_amp: self.float("simulation.n400_amp"),
            p600_amp: self.float("simulation.p600_amp"),
            affected_channels: self.values["simulation.affected_channels"]
                .as_array()
                .expect("validated list")
                .iter()
                .map(|v| v.as_integer().expect("validated integer") as usize)
                .collect(),
            n_topics: self.int("simulation.n_topics"),
            docs_per_topic: self.int("simulation.docs_per_topic"),
            terms_per_topic: self.int("simulation.terms_per_topic"),
            filler_words: self.int("simulation.filler_words"),
            blink_rate_hz: self.float("simulation.blink_rate_hz"),
            seed: self.seed(),
        }
    }

    pub fn participants(&self) -> usize {
        self.int("simulation.participants")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let e = self.evaluation();
        if e.windows.count == 0 || !(e.windows.end_ms > e.windows.start_ms) || e.windows.start_ms < 0.0 {
            return bad(format!("feature windows {:?} are empty or start before onset", e.windows));
        }
        if e.windows.end_ms > crate::eeg::EPOCH_END_MS {
            return bad(format!("feature windows end at {} ms, after the epoch", e.windows.end_ms));
        }
        if let Shrinkage::Fixed(l) = e.shrinkage {
            if !(0.0..=1.0).contains(&l) {
                return bad(format!("classifier.shrinkage {l} outside [0, 1]"));
            }
        }
        if !(e.linrel.lambda > 0.0) || !e.linrel.lambda.is_finite() {
            return bad(format!("intent.lambda must be positive, got {}", e.linrel.lambda));
        }
        if !(e.linrel.c >= 0.0) || !e.linrel.c.is_finite() {
            return bad(format!("intent.c must be non-negative, got {}", e.linrel.c));
        }
        if e.m_terms == 0 {
            return bad("intent.m_terms must be at least 1".into());
        }
        if !(e.mu > 0.0) || !e.mu.is_finite() {
            return bad(format!("retrieval.mu must be positive, got {}", e.mu));
        }
        if e.depth == 0 {
            return bad("retrieval.k must be at least 1".into());
        }
        if self.participants() == 0 {
            return bad("simulation.participants must be at least 1".into());
        }
        self.simulation().validate()
    }

    /// Sorted `key = value` lines of every key.
    pub fn resolved(&self) -> String {
        self.render(|_| true)
    }

    fn render(&self, keep: impl Fn(&str) -> bool) -> String {
        self.values
            .iter()
            .filter(|(k, _)| keep(k))
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// Hex SHA-256 of the resolved non-path keys.
    pub fn hash(&self) -> String {
        let text = self.render(|k| !k.starts_with("paths."));
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_documented_values() {
        let c = PipelineConfig::load(None, &[]).unwrap();
        let e = c.evaluation();
        assert_eq!(e.linrel, LinRelParams { lambda: 0.5, c: 2.0 });
        assert_eq!(e.mu, 2000.0);
        assert_eq!(e.depth, 30);
        assert_eq!(e.permutations, 1000);
        assert_eq!(e.windows, FeatureWindows::default());
        assert_eq!(e.shrinkage, Shrinkage::Analytic);
        assert!(c.resolved().contains("retrieval.mu = 2000.0\n"));
        assert!(!c.is_explicit("retrieval.mu"));
    }

    #[test]
    fn file_then_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "seed = 7\nintent.lambda = 1\n[retrieval]\nk = 10\n").unwrap();
        let c = PipelineConfig::load(Some(&path), &["retrieval.k=20".into(), "classifier.shrinkage=0.3".into()]).unwrap();
        assert_eq!(c.seed(), 7);
        assert_eq!(c.evaluation().linrel.lambda, 1.0);
        assert_eq!(c.evaluation().depth, 20);
        assert_eq!(c.shrinkage(), Shrinkage::Fixed(0.3));
        assert!(c.is_explicit("retrieval.k"));
    }

    #[test]
    fn rejects_bad_input() {
        for o in ["nope=1", "intent.lambda=0", "intent.lambda=\"x\"", "retrieval.k=-3", "classifier.shrinkage=2", "simulation.noise_sd=0", "x"] {
            assert!(PipelineConfig::load(None, &[o.to_string()]).is_err(), "{o}");
        }
    }

    #[test]
    fn hash_ignores_paths_and_integer_spelling() {
        let a = PipelineConfig::load(None, &["retrieval.mu=2000".into()]).unwrap();
        let b = PipelineConfig::load(None, &["paths.output=/tmp/x".into()]).unwrap();
        let c = PipelineConfig::load(None, &["seed=1".into()]).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash(), PipelineConfig::default().hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
