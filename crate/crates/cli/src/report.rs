use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use ptolemaic::metric::SpaceDescriptor;
use ptolemaic::ExtendedMetricSpace;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputInfo {
    pub source: String,
    /// SHA-256 of the space's canonical JSON matrix form.
    pub digest: String,
    pub points: usize,
    pub omega: Option<usize>,
}

impl InputInfo {
    pub fn new(source: String, space: &ExtendedMetricSpace) -> Self {
        let canonical = serde_json::to_vec(&SpaceDescriptor::from_space(space)).expect("matrix serializes");
        InputInfo {
            source,
            digest: format!("sha256:{:x}", Sha256::digest(&canonical)),
            points: space.n(),
            omega: space.omega(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub kappa: Option<f64>,
    pub seed: Option<u64>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Wall-clock data; everything outside this section is reproducible.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub workers: u32,
    pub total_s: f64,
    /// Per-scan times, keyed by their path in `results`.
    pub scans: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub inputs: Vec<InputInfo>,
    pub config: Config,
    pub results: Value,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
    pub timings: Timings,
}

impl Report {
    pub fn new(command: &str, config: Config) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool: "ptolemaic".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            inputs: Vec::new(),
            config,
            results: Value::Null,
            verdicts: Vec::new(),
            pass: true,
            timings: Timings::default(),
        }
    }

    /// `value ≤ threshold + tolerance`.
    pub fn check(&mut self, name: &str, value: f64, threshold: f64) {
        let pass = value <= threshold + self.config.tolerance;
        self.pass &= pass;
        self.verdicts.push(Verdict { name: name.into(), value, threshold, pass });
    }

    /// Store results, moving every `elapsed_s` field into the timings.
    pub fn set_results(&mut self, mut results: Value) {
        take_elapsed(&mut results, String::new(), &mut self.timings.scans);
        self.results = results;
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,value,threshold,pass\n");
        for v in &self.verdicts {
            out.push_str(&format!("{},{},{},{}\n", v.name, v.value, v.threshold, v.pass));
        }
        out
    }
}

fn take_elapsed(v: &mut Value, path: String, out: &mut BTreeMap<String, f64>) {
    match v {
        Value::Object(map) => {
            if let Some(t) = map.remove("elapsed_s").and_then(|t| t.as_f64()) {
                out.insert(if path.is_empty() { "results".into() } else { path.clone() }, t);
            }
            for (k, child) in map.iter_mut() {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                take_elapsed(child, p, out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter_mut().enumerate() {
                take_elapsed(child, format!("{path}[{i}]"), out);
            }
        }
        _ => {}
    }
}
