use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use sqg_core::manifest::{write_atomic, RunManifest};

use crate::failure::Failure;

/// Collects the files of one command and writes its manifest last.
pub struct Outputs {
    dir: PathBuf,
    stem: String,
    manifest: RunManifest,
    started: Instant,
}

impl Outputs {
    pub fn create(
        dir: &Path,
        stem: &str,
        command: &str,
        config: serde_json::Value,
        seed: u64,
    ) -> Result<Self, Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::Runtime(format!("output directory {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            stem: stem.to_string(),
            manifest: RunManifest::new(command, config, seed),
            started: Instant::now(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, Failure> {
        let path = self.dir.join(name);
        write_atomic(&path, bytes)?;
        self.manifest.add_output(&self.dir, &path)?;
        Ok(path)
    }

    pub fn write_with(
        &mut self,
        name: &str,
        f: impl FnOnce(&mut Vec<u8>) -> sqg_core::Result<()>,
    ) -> Result<PathBuf, Failure> {
        let mut buf = Vec::new();
        f(&mut buf)?;
        self.write(name, &buf)
    }

    pub fn timing(&mut self, name: &str, seconds: f64) {
        self.manifest.timing(name, seconds);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.manifest.notes.push(line.into());
    }

    /// Writes `<stem>.manifest.json`, the completion marker.
    pub fn finish(mut self) -> Result<PathBuf, Failure> {
        let total = self.started.elapsed().as_secs_f64();
        self.manifest.timing("total", total);
        let path = self.dir.join(format!("{}.manifest.json", self.stem));
        self.manifest.write(&path)?;
        Ok(path)
    }
}
