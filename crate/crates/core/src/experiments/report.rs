use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::config::{Command, ExperimentConfig};

/// Named metrics; keys serialize in sorted order.
pub type Metrics = BTreeMap<String, Value>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub metrics: Metrics,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TrialRecord {
    pub fn new(trial: usize, seed: u64) -> Self {
        Self { trial, seed, metrics: Metrics::new(), pass: false, error: None }
    }

    pub fn failed(trial: usize, seed: u64, error: impl ToString) -> Self {
        Self { error: Some(error.to_string()), ..Self::new(trial, seed) }
    }

    pub fn metric(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metrics.insert(key.to_owned(), value.into());
        self
    }

    pub fn passed(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).and_then(Value::as_f64)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    #[serde(flatten)]
    pub metrics: Metrics,
    /// Indices of failed trials.
    pub failures: Vec<usize>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Command,
    pub config: ExperimentConfig,
    pub input_hash: String,
    pub exploratory: bool,
    pub results: Vec<TrialRecord>,
    pub summary: Summary,
}

impl Report {
    /// Assembles a report; the summary's `pass` is false if any trial failed.
    pub fn new(config: &ExperimentConfig, results: Vec<TrialRecord>, mut metrics: Metrics, extra_pass: bool) -> Self {
        let failures: Vec<usize> = results.iter().filter(|r| !r.pass).map(|r| r.trial).collect();
        metrics.insert("trials".into(), results.len().into());
        let pass = failures.is_empty() && extra_pass;
        Self {
            command: config.command,
            config: config.clone(),
            input_hash: input_hash(config),
            exploratory: config.exploratory(),
            results,
            summary: Summary { metrics, failures, pass },
        }
    }

    pub fn pass(&self) -> bool {
        self.summary.pass
    }

    /// Pretty-printed JSON body followed by a newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are serializable");
        s.push('\n');
        s
    }
}

/// Git-style content hash of the configuration: SHA-256 over
/// `"blob <len>\0<canonical json>"`, hex encoded.
pub fn input_hash(config: &ExperimentConfig) -> String {
    let body = serde_json::to_string(config).expect("config is serializable");
    let mut hasher = Sha256::new();
    hasher.update(format!("blob {}\0", body.len()).as_bytes());
    hasher.update(body.as_bytes());
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
