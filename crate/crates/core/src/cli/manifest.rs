use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Provenance record written next to the outputs of every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool_version: String,
    pub config_hash: String,
    pub master_seed: u64,
    pub command: Vec<String>,
    /// RFC 3339, UTC. The only field that differs between identical runs.
    pub timestamp: String,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(config_hash: String, master_seed: u64, command: Vec<String>, outputs: Vec<String>) -> Self {
        Self {
            tool_version: crate::VERSION.to_string(),
            config_hash,
            master_seed,
            command,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            outputs,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("manifest serializes") + "\n";
        fs::write(path, json).map_err(|e| Error::io(path, e))
    }
}
