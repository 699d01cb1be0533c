//! Run manifests: one JSON file per invocation recording the subcommand,
//! resolved config, τ-table digest, timestamps, and every emitted file.
//! Written once at start and finalized on exit, so even a failed run
//! leaves a record.

use serde::Serialize;
use std::path::{Path, PathBuf};

use bvlab_core::Result;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: serde_json::Value,
    pub tau_table_digest: Option<String>,
    pub started: String,
    pub finished: Option<String>,
    pub outputs: Vec<String>,
    pub status: String,
}

impl RunManifest {
    pub fn begin(subcommand: &str, config: serde_json::Value) -> RunManifest {
        RunManifest {
            subcommand: subcommand.to_string(),
            config,
            tau_table_digest: None,
            started: chrono::Utc::now().to_rfc3339(),
            finished: None,
            outputs: Vec::new(),
            status: "running".to_string(),
        }
    }

    pub fn record_tau_digest(&mut self, digest: u64) {
        self.tau_table_digest = Some(format!("{digest:016x}"));
    }

    pub fn record_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn path_for(out: &Path) -> PathBuf {
        let mut name = out.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        out.with_file_name(name)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn finish(&mut self, path: &Path, ok: bool) -> Result<()> {
        self.finished = Some(chrono::Utc::now().to_rfc3339());
        self.status = if ok { "ok" } else { "failed" }.to_string();
        self.write(path)
    }
}
