//! Configuration-driven experiment harness.
//!
//! An experiment names a field source, the invariant to predict, one or more
//! encodings and a classifier. [`run_experiment`] splits the labeled pool,
//! trains on one side, evaluates on the other and, for quadratic sources,
//! on further discriminant ranges the model never saw. Results come back as
//! [`ResultRow`]s, optionally checked against reference figures.
//!
//! [`DEFAULT_CONFIG`] holds the bundled registry of experiments.

mod census;
mod config;
mod manifest;
mod report;
mod run;

pub use census::{census_real_quadratic, census_real_quadratic_range, class_numbers, Census, CLASS_BLOCK};
pub use config::{ClassifierKind, ConfigFile, ExperimentConfig, Invariant, RangeSpec, Reference, Source};
pub use manifest::{read_manifest, run_dir_path, sha256_hex, timestamp, write_run, RunManifest};
pub use report::{emit_report, parse_json_report, ReportFormat, ResultRow, REPORT_COLUMNS};
pub use run::{evaluate_range, prepare, run_experiment, train_model, ExperimentOutcome, Item, Prepared, RunContext};

use thiserror::Error;

use crate::fields::FieldError;
use crate::ingest::IngestError;
use crate::ml::MlError;
use crate::quadratic::QuadraticError;

/// The bundled experiment registry (TOML).
pub const DEFAULT_CONFIG: &str = include_str!("../../experiments.toml");

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(String),
    #[error("no experiment named '{0}'")]
    UnknownExperiment(String),
    #[error("source: {0}")]
    Source(String),
    #[error("class '{class}' has no fields{}", group.as_ref().map(|g| format!(" in group {g}")).unwrap_or_default())]
    ZeroSupport { class: String, group: Option<String> },
    #[error("cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Quadratic(#[from] QuadraticError),
    #[error(transparent)]
    Ml(#[from] MlError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
