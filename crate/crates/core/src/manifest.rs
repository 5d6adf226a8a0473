//! Run manifests: what was run, with what, and the hash of every output.
//! The manifest is written last, through a rename, so its presence marks a
//! completed run.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub artifact_version: String,
    pub outputs: Vec<OutputEntry>,
    /// Wall-clock seconds per named phase.
    #[serde(default)]
    pub timings: BTreeMap<String, f64>,
    /// Free-form status lines, e.g. why a run stopped early.
    #[serde(default)]
    pub notes: Vec<String>,
    /// Seconds since the Unix epoch at completion.
    pub completed_unix: u64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn file_sha256(path: &Path) -> Result<String> {
    Ok(sha256_hex(&fs::read(path)?))
}

/// Writes `bytes` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

impl RunManifest {
    pub fn new(command: impl Into<String>, config: serde_json::Value, seed: u64) -> Self {
        Self {
            command: command.into(),
            config,
            seed,
            artifact_version: ARTIFACT_VERSION.to_string(),
            outputs: Vec::new(),
            timings: BTreeMap::new(),
            notes: Vec::new(),
            completed_unix: 0,
        }
    }

    /// Records `path` with the hash of its current contents. Paths are stored
    /// relative to `base` when they lie under it.
    pub fn add_output(&mut self, base: &Path, path: &Path) -> Result<()> {
        let shown = path.strip_prefix(base).unwrap_or(path);
        self.outputs.push(OutputEntry {
            path: shown.to_string_lossy().into_owned(),
            sha256: file_sha256(path)?,
        });
        Ok(())
    }

    pub fn timing(&mut self, name: impl Into<String>, seconds: f64) {
        self.timings.insert(name.into(), seconds);
    }

    /// Rehashes every listed output under `base`; true iff all match.
    pub fn verify(&self, base: &Path) -> Result<bool> {
        for o in &self.outputs {
            if file_sha256(&base.join(&o.path))? != o.sha256 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn write(&mut self, path: &Path) -> Result<()> {
        self.completed_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        write_atomic(path, serde_json::to_string_pretty(self)?.as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&fs::read(path)?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn roundtrip_and_verify() {
        let dir = std::env::temp_dir().join(format!("sqg-manifest-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let out = dir.join("a.csv");
        fs::write(&out, "x\n1\n").unwrap();
        let mut m = RunManifest::new("simulate", serde_json::json!({"gamma": 0.5}), 7);
        m.add_output(&dir, &out).unwrap();
        m.timing("run", 1.5);
        let mp = dir.join("manifest.json");
        m.write(&mp).unwrap();
        let back = RunManifest::read(&mp).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.outputs[0].path, "a.csv");
        assert!(back.verify(&dir).unwrap());
        fs::write(&out, "changed").unwrap();
        assert!(!back.verify(&dir).unwrap());
        fs::remove_dir_all(&dir).unwrap();
    }
}
