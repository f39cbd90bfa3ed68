//! Loading number-field records: snapshot CSV files, the optional LMFDB web
//! client with an on-disk cache, and balanced sampling.

#[cfg(feature = "lmfdb")]
mod lmfdb;
mod sample;
mod snapshot;

#[cfg(feature = "lmfdb")]
pub use lmfdb::{fetch_lmfdb, galois_transitive_label, normalize_payload, HttpGet, LmfdbQuery, UreqTransport};
pub use sample::balance_sample;
pub use snapshot::{parse_records, read_snapshot, serialize_records, write_snapshot, FieldRecord, SNAPSHOT_HEADER};

use thiserror::Error;

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "ZETALAB_CACHE";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("duplicate label '{label}' at line {line}")]
    DuplicateLabel { line: usize, label: String },
    #[error("network failure: {0}")]
    Network(String),
    #[error("unexpected remote payload: {0}")]
    Schema(String),
    #[error("unknown Galois group '{0}'")]
    UnknownGroup(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Cache directory: `$ZETALAB_CACHE` if set, otherwise `.zetalab-cache` under
/// the working directory.
pub fn default_cache_dir() -> std::path::PathBuf {
    std::env::var_os(CACHE_ENV).map(Into::into).unwrap_or_else(|| std::path::PathBuf::from(".zetalab-cache"))
}
