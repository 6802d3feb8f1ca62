use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub inputs: Vec<InputDigest>,
    pub workers: usize,
    pub started_unix_ms: u128,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects manifest fields while a command runs.
#[derive(Debug)]
pub struct ManifestBuilder {
    command: String,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
    started: Instant,
    started_unix_ms: u128,
}

impl ManifestBuilder {
    pub fn start(command: &str) -> Self {
        let started_unix_ms =
            SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0);
        ManifestBuilder {
            command: command.to_string(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            started: Instant::now(),
            started_unix_ms,
        }
    }

    pub fn input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.push(InputDigest { path: path.display().to_string(), sha256: sha256_hex(bytes) });
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn finish(&self, workers: usize) -> RunManifest {
        RunManifest {
            command: self.command.clone(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: self.inputs.clone(),
            workers,
            started_unix_ms: self.started_unix_ms,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            outputs: self.outputs.clone(),
        }
    }
}

/// A report body with its manifest attached.
#[derive(Debug, Clone, Serialize)]
pub struct Report<'a, B: Serialize> {
    #[serde(flatten)]
    pub body: &'a B,
    pub manifest: RunManifest,
}
