use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::report::{emit_report, ReportFormat, ResultRow};
use super::ExperimentError;

/// Describes one run directory well enough to repeat the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub experiments: Vec<String>,
    pub config_path: Option<String>,
    pub config_sha256: String,
    pub seed: u64,
    pub jobs: usize,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// `<root>/<name>-<first 12 hex digits of the config hash>-seed<seed>`.
pub fn run_dir_path(root: &Path, name: &str, config_sha256: &str, seed: u64) -> PathBuf {
    root.join(format!("{name}-{}-seed{seed}", &config_sha256[..12.min(config_sha256.len())]))
}

/// Writes the report in every format plus `manifest.json` into `dir`.
pub fn write_run(dir: &Path, rows: &[ResultRow], manifest: &mut RunManifest) -> Result<(), ExperimentError> {
    std::fs::create_dir_all(dir)?;
    manifest.outputs.clear();
    for (format, file) in
        [(ReportFormat::Text, "results.txt"), (ReportFormat::Csv, "results.csv"), (ReportFormat::Json, "results.json")]
    {
        std::fs::write(dir.join(file), emit_report(rows, format))?;
        manifest.outputs.push(file.to_string());
    }
    let text = serde_json::to_string_pretty(manifest).map_err(|e| ExperimentError::Cache(e.to_string()))?;
    std::fs::write(dir.join("manifest.json"), text + "\n")?;
    Ok(())
}

pub fn read_manifest(dir: &Path) -> Result<RunManifest, ExperimentError> {
    let text = std::fs::read_to_string(dir.join("manifest.json"))?;
    serde_json::from_str(&text).map_err(|e| ExperimentError::Config(format!("manifest: {e}")))
}
