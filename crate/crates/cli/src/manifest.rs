//! Run manifest: config snapshot, seeds, per-stage artifact checksums and
//! timings. Timings live in their own map so determinism checks can drop them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{RunConfig, Seeds};
use crate::error::{CliError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    /// Relative to the run directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: RunConfig,
    pub seeds: Seeds,
    /// Stage name → artifacts it wrote.
    pub stages: BTreeMap<String, Vec<Artifact>>,
    /// Stage name → wall-clock seconds.
    pub timings: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn new(config: &RunConfig) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            seeds: config.seeds(),
            stages: BTreeMap::new(),
            timings: BTreeMap::new(),
        }
    }

    pub fn load(run_dir: &Path) -> Result<Self> {
        let path = run_dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(CliError::io(&path))?;
        serde_json::from_str(&text).map_err(|e| CliError::Artifact {
            path,
            reason: e.to_string(),
        })
    }

    pub fn save(&self, run_dir: &Path) -> Result<()> {
        let path = run_dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self).expect("manifest serialises");
        std::fs::write(&path, text + "\n").map_err(CliError::io(&path))
    }

    /// Manifest text with the timings removed, for run-to-run comparison.
    pub fn without_timings(&self) -> String {
        let mut m = self.clone();
        m.timings.clear();
        serde_json::to_string_pretty(&m).expect("manifest serialises")
    }

    pub fn record(&mut self, stage: &str, artifacts: Vec<Artifact>, seconds: f64) {
        self.stages.insert(stage.to_string(), artifacts);
        self.timings.insert(stage.to_string(), seconds);
    }

    /// Problems found when re-hashing every listed artifact.
    pub fn verify(&self, run_dir: &Path) -> Vec<String> {
        let mut problems = Vec::new();
        for (stage, artifacts) in &self.stages {
            for a in artifacts {
                let path = run_dir.join(&a.path);
                match std::fs::read(&path) {
                    Err(_) => problems.push(format!("{stage}: missing {}", a.path)),
                    Ok(bytes) if sha256_hex(&bytes) != a.sha256 => {
                        problems.push(format!("{stage}: checksum mismatch {}", a.path))
                    }
                    Ok(_) => {}
                }
            }
        }
        problems
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash files (given relative to `run_dir`) into manifest entries.
pub fn describe(run_dir: &Path, relative: &[PathBuf]) -> Result<Vec<Artifact>> {
    relative
        .iter()
        .map(|rel| {
            let path = run_dir.join(rel);
            let bytes = std::fs::read(&path).map_err(CliError::io(&path))?;
            Ok(Artifact {
                path: rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/"),
                sha256: sha256_hex(&bytes),
                bytes: bytes.len() as u64,
            })
        })
        .collect()
}
