//! Classifiers over integer feature vectors: random forests, logistic
//! regression, and the precision / Matthews-correlation evaluation.

mod dataset;
mod forest;
mod logistic;
mod metrics;

pub use dataset::{signed_log, split_dataset, split_indices, LabeledDataset, SplitPair};
pub use forest::{train_forest, ForestConfig, ForestModel};
pub use logistic::{train_logistic, LogisticConfig, LogisticModel, Loss};
pub use metrics::{evaluate, evaluate_predictions, mcc_from_confusion, EvalReport};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MlError {
    #[error("training data needs at least two classes, found {0}")]
    SingleClass(usize),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("split with train fraction {fraction} leaves an empty side ({train} train, {validation} validation)")]
    DegenerateSplit { fraction: f64, train: usize, validation: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unsupported model format version {0}")]
    Version(u32),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Anything that maps a feature row to a class index.
pub trait Classifier: Sync {
    fn num_features(&self) -> usize;
    fn num_classes(&self) -> usize;
    fn predict_row(&self, row: &[f64]) -> usize;

    /// Predictions for every row of `data`, in order.
    fn predict(&self, data: &LabeledDataset) -> Vec<usize> {
        use rayon::prelude::*;
        (0..data.len()).into_par_iter().map(|i| self.predict_row(data.row(i))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Model {
    Forest(ForestModel),
    Logistic(LogisticModel),
}

impl Classifier for Model {
    fn num_features(&self) -> usize {
        match self {
            Model::Forest(m) => m.num_features(),
            Model::Logistic(m) => m.num_features(),
        }
    }

    fn num_classes(&self) -> usize {
        match self {
            Model::Forest(m) => m.num_classes(),
            Model::Logistic(m) => m.num_classes(),
        }
    }

    fn predict_row(&self, row: &[f64]) -> usize {
        match self {
            Model::Forest(m) => m.predict_row(row),
            Model::Logistic(m) => m.predict_row(row),
        }
    }
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Versioned, self-describing model file (JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub class_names: Vec<String>,
    /// Free-form description of how features were produced (encoding, length,
    /// invariant, transforms).
    pub features: std::collections::BTreeMap<String, String>,
    pub model: Model,
}

impl ModelFile {
    pub fn new(model: Model, class_names: Vec<String>) -> Self {
        ModelFile { format_version: MODEL_FORMAT_VERSION, class_names, features: Default::default(), model }
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), MlError> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(file, self)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self, MlError> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let parsed: ModelFile = serde_json::from_reader(file)?;
        if parsed.format_version != MODEL_FORMAT_VERSION {
            return Err(MlError::Version(parsed.format_version));
        }
        Ok(parsed)
    }
}
