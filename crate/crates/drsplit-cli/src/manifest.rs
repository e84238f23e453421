//! Run manifests: a small JSON sidecar written next to every file-producing
//! command, recording what was run, with which parameters and seed, and which
//! output files it produced. Invariant: every path listed in `outputs`
//! exists on disk by the time the manifest itself is written.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::errors::CliError;

#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub seed: u64,
    pub outputs: Vec<String>,
    /// ISO-8601 timestamp of when the run finished writing its outputs.
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            seed,
            outputs: Vec::new(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.parameters.insert(key.to_string(), value.into());
    }

    pub fn record_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    /// Serializes the manifest to `path`. Call only after all recorded
    /// outputs have been written, so the existence invariant holds.
    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut body = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Io(format!("manifest serialization: {e}")))?;
        body.push('\n');
        std::fs::write(path, body).map_err(|e| CliError::io(path, e))
    }
}

/// Sidecar path for a manifest: the output path with its final extension
/// replaced by `manifest.json` (e.g. `rates.csv` -> `rates.manifest.json`).
pub fn manifest_path_for(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}
