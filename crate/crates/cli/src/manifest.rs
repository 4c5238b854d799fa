use std::fs;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use serde::Serialize;

use crate::config::ConfigFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Running,
    Complete,
    Truncated,
}

#[derive(Debug, Clone, Serialize)]
pub struct Outputs {
    pub curve: PathBuf,
    pub raw: Option<PathBuf>,
    pub manifest: PathBuf,
}

/// Record of one sweep. Written before the first trial and rewritten when
/// the run ends.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub version: &'static str,
    pub seed: u64,
    pub config_path: Option<PathBuf>,
    /// Text of the config file exactly as read.
    pub config_snapshot: Option<String>,
    pub resolved_config: ConfigFile,
    pub started_at: String,
    pub finished_at: Option<String>,
    pub status: RunStatus,
    pub error: Option<String>,
    pub outputs: Outputs,
}

pub fn now() -> String {
    humantime::format_rfc3339_millis(SystemTime::now()).to_string()
}

/// `out.csv` -> `out.<suffix>`.
pub fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.{suffix}"))
}

impl RunManifest {
    pub fn write(&self) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        text.push('\n');
        fs::write(&self.outputs.manifest, text)
    }

    pub fn finish(&mut self, error: Option<String>) -> std::io::Result<()> {
        self.finished_at = Some(now());
        self.status = if error.is_some() {
            RunStatus::Truncated
        } else {
            RunStatus::Complete
        };
        self.error = error;
        self.write()
    }
}
