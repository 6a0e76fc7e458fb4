//! Self-contained run reports: command echo, input digests, exact results,
//! parameters and timing. Identical invocations with identical seeds
//! produce byte-identical `results` sections; timing lives outside it.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs: BTreeMap<String, InputDigest>,
    pub params: Value,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Value>,
    pub timing_ms: u128,
}

pub struct ReportBuilder {
    start: Instant,
    inputs: BTreeMap<String, InputDigest>,
    params: Value,
    provenance: Option<Value>,
}

impl ReportBuilder {
    pub fn new() -> ReportBuilder {
        ReportBuilder {
            start: Instant::now(),
            inputs: BTreeMap::new(),
            params: Value::Null,
            provenance: None,
        }
    }

    pub fn input(&mut self, name: &str, path: &Path) {
        let digest = std::fs::read(path)
            .map(|bytes| format!("{:x}", Sha256::digest(&bytes)))
            .unwrap_or_else(|_| "unreadable".to_string());
        self.inputs.insert(
            name.to_string(),
            InputDigest { path: path.display().to_string(), sha256: digest },
        );
    }

    pub fn params(&mut self, params: Value) {
        self.params = params;
    }

    pub fn provenance(&mut self, provenance: Value) {
        self.provenance = Some(provenance);
    }

    pub fn finish(self, results: Value) -> RunReport {
        RunReport {
            command: std::env::args().collect(),
            inputs: self.inputs,
            params: self.params,
            results,
            provenance: self.provenance,
            timing_ms: self.start.elapsed().as_millis(),
        }
    }
}

impl RunReport {
    /// Prints the report: full JSON with `--json`, otherwise the plain
    /// result values one per line.
    pub fn print(&self, json: bool) {
        if json {
            println!("{}", serde_json::to_string_pretty(self).expect("report serializes"));
            return;
        }
        match &self.results {
            // A single result prints bare, e.g. `1` or `1/8`.
            Value::Object(map) if map.len() == 1 => {
                match map.values().next().expect("one entry") {
                    Value::String(s) => println!("{s}"),
                    other => println!("{other}"),
                }
            }
            Value::Object(map) => {
                for (key, value) in map {
                    match value {
                        Value::String(s) => println!("{key}: {s}"),
                        other => println!("{key}: {other}"),
                    }
                }
            }
            Value::String(s) => println!("{s}"),
            other => println!("{other}"),
        }
    }
}
