//! Run manifests: the fully materialised parameter set of a command plus its
//! output files, written as `manifest.json` next to the outputs. Re-running
//! the recorded command reproduces the CSVs byte for byte (evaluation order
//! is fixed and nothing is randomised); the timestamp lives only here.

use anyhow::{Context, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub tool_version: String,
    pub timestamp: String,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            outputs: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.parameters.insert(
            key.to_string(),
            serde_json::to_value(value).expect("parameter serialises"),
        );
    }

    pub fn output(&mut self, name: &str) {
        self.outputs.push(name.to_string());
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join("manifest.json");
        let body = serde_json::to_string_pretty(self).context("serialising manifest")?;
        std::fs::write(&path, body + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}
