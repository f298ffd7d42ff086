//! Per-run manifest: enough to rerun the experiment and verify its inputs.

use std::path::{Path, PathBuf};

use otalign::Result;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: RunConfig,
    /// sha256 of every input file, keyed by role.
    pub input_checksums: Vec<(String, String)>,
    pub seed: u64,
    pub outputs: Vec<String>,
    pub timing: TimingSummary,
    pub metrics: Option<serde_json::Value>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub struct TimingSummary {
    pub load_secs: f64,
    pub train_secs: f64,
    pub write_secs: f64,
    pub total_secs: f64,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

pub fn input_checksums(cfg: &RunConfig) -> Result<Vec<(String, String)>> {
    let mut out = vec![
        ("edges1".to_string(), sha256_file(&cfg.edges1)?),
        ("edges2".to_string(), sha256_file(&cfg.edges2)?),
        ("anchors".to_string(), sha256_file(&cfg.anchors)?),
    ];
    if let Some(p) = &cfg.attrs1 {
        out.push(("attrs1".to_string(), sha256_file(p)?));
    }
    if let Some(p) = &cfg.attrs2 {
        out.push(("attrs2".to_string(), sha256_file(p)?));
    }
    Ok(out)
}

impl RunManifest {
    /// Write atomically: temp file in the same directory, then rename.
    pub fn write(&self, path: &PathBuf) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| otalign::Error::Config(format!("manifest encode failed: {e}")))?;
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, json)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}
