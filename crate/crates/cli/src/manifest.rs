use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use serde::Serialize;

use crate::Failure;

#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub path: String,
    /// Git-style SHA-256 blob hash of the file contents.
    pub blob_hash: String,
}

impl Artifact {
    fn of(path: &Path, content: &[u8]) -> Self {
        Self { path: path.display().to_string(), blob_hash: framescape::io::blob_hash(content) }
    }
}

/// Replay record of one command.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub version: &'static str,
    pub inputs: Vec<Artifact>,
    pub config: serde_json::Value,
    pub outputs: Vec<Artifact>,
    pub wall_time: f64,
    pub status: String,
    #[serde(skip)]
    started: Option<Instant>,
}

impl RunManifest {
    pub fn start(command: &str) -> Self {
        Self {
            command: command.to_string(),
            argv: std::env::args().collect(),
            version: env!("CARGO_PKG_VERSION"),
            inputs: Vec::new(),
            config: serde_json::Value::Null,
            outputs: Vec::new(),
            wall_time: 0.0,
            status: String::new(),
            started: Some(Instant::now()),
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<Vec<u8>, Failure> {
        let bytes = std::fs::read(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push(Artifact::of(path, &bytes));
        Ok(bytes)
    }

    /// Writes `content` to `dir/name` and records its hash.
    pub fn write(&mut self, dir: &Path, name: &str, content: &str) -> Result<PathBuf, Failure> {
        let path = dir.join(name);
        std::fs::write(&path, content).with_context(|| format!("writing {}", path.display())).map_err(Failure::io)?;
        self.outputs.push(Artifact::of(&path, content.as_bytes()));
        Ok(path)
    }

    /// Stamps status and wall time and writes `manifest.json` into `dir`.
    pub fn finish(mut self, dir: &Path, status: &str) -> Result<PathBuf, Failure> {
        self.status = status.to_string();
        self.wall_time = self.started.map_or(0.0, |t| t.elapsed().as_secs_f64());
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&self).expect("manifest serializes");
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display())).map_err(Failure::io)?;
        Ok(path)
    }
}
