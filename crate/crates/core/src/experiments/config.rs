use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::fields::Encoding;
use crate::ml::{ForestConfig, LogisticConfig};

/// A configuration file: one `[experiments.<name>]` table per experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiments: BTreeMap<String, ExperimentConfig>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        let parsed: ConfigFile = toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        for (name, cfg) in &parsed.experiments {
            cfg.validate().map_err(|e| ExperimentError::Config(format!("[experiments.{name}]: {e}")))?;
        }
        Ok(parsed)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, name: &str) -> Result<&ExperimentConfig, ExperimentError> {
        self.experiments.get(name).ok_or_else(|| ExperimentError::UnknownExperiment(name.to_string()))
    }
}

/// Where the fields of an experiment come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    /// Every quadratic field with fundamental discriminant in `[min_disc, max_disc]`.
    Quadratic { min_disc: i64, max_disc: i64 },
    /// Fields read from a snapshot CSV, optionally filtered.
    Snapshot {
        path: PathBuf,
        #[serde(default)]
        degrees: Vec<u32>,
        #[serde(default)]
        galois: Vec<String>,
    },
}

impl Source {
    pub fn is_snapshot(&self) -> bool {
        matches!(self, Source::Snapshot { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Invariant {
    Degree,
    Rank,
    GaloisGroup,
    ClassNumber,
    /// `divisible` when 3 divides the class number, else `not_divisible`.
    ClassNumberMod3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    #[default]
    Forest,
    Logistic,
}

impl std::fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ClassifierKind::Forest => "forest",
            ClassifierKind::Logistic => "logistic",
        })
    }
}

/// A quadratic discriminant range evaluated with the base model, unretrained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub label: String,
    pub min_disc: i64,
    pub max_disc: i64,
}

/// Reference figures for one result row plus the acceptance bounds applied
/// to it. `scope` is `base` or an extrapolation label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reference {
    #[serde(default)]
    pub encoding: Option<Encoding>,
    #[serde(default = "base_scope")]
    pub scope: String,
    #[serde(default)]
    pub group: Option<String>,
    #[serde(default)]
    pub precision: Option<f64>,
    #[serde(default)]
    pub mcc: Option<f64>,
    #[serde(default)]
    pub min_precision: Option<f64>,
    #[serde(default)]
    pub max_precision: Option<f64>,
    #[serde(default)]
    pub min_mcc: Option<f64>,
    /// Allowed absolute deviation from `precision`.
    #[serde(default)]
    pub tolerance: Option<f64>,
}

fn base_scope() -> String {
    "base".to_string()
}

impl Reference {
    pub fn matches(&self, encoding: Encoding, scope: &str, group: Option<&str>) -> bool {
        self.encoding.is_none_or(|e| e == encoding) && self.scope == scope && self.group.as_deref() == group
    }

    /// `None` when the reference carries no bounds.
    pub fn check(&self, precision: f64, mcc: f64) -> Option<bool> {
        let mut any = false;
        let mut ok = true;
        if let Some(lo) = self.min_precision {
            any = true;
            ok &= precision >= lo;
        }
        if let Some(hi) = self.max_precision {
            any = true;
            ok &= precision <= hi;
        }
        if let Some(lo) = self.min_mcc {
            any = true;
            ok &= mcc >= lo;
        }
        if let (Some(tol), Some(target)) = (self.tolerance, self.precision) {
            any = true;
            ok &= (precision - target).abs() <= tol;
        }
        any.then_some(ok)
    }
}

fn default_fraction() -> f64 {
    0.8
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub description: String,
    pub source: Source,
    pub invariant: Invariant,
    /// Class labels to keep, in output order. Empty keeps every observed
    /// label, sorted numerically where possible.
    #[serde(default)]
    pub classes: Vec<String>,
    pub encodings: Vec<Encoding>,
    #[serde(default)]
    pub classifier: ClassifierKind,
    #[serde(default)]
    pub forest: ForestConfig,
    #[serde(default)]
    pub logistic: LogisticConfig,
    #[serde(default = "default_fraction")]
    pub train_fraction: f64,
    #[serde(default)]
    pub seed: u64,
    /// Cap every class at this many fields (sampled without replacement).
    #[serde(default)]
    pub balance_per_class: Option<usize>,
    /// Cap every class at the size of the smallest class.
    #[serde(default)]
    pub balance_to_smallest: bool,
    #[serde(default = "yes")]
    pub include_uncertain: bool,
    #[serde(default)]
    pub zeta_length: Option<usize>,
    #[serde(default)]
    pub split_length: Option<usize>,
    /// Apply `sign(x) ln(1 + |x|)` to polynomial features.
    #[serde(default)]
    pub signed_log: bool,
    /// Run separately for each Galois group in the source.
    #[serde(default)]
    pub per_group: bool,
    #[serde(default)]
    pub extrapolation: Vec<RangeSpec>,
    #[serde(default)]
    pub references: Vec<Reference>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.encodings.is_empty() {
            return Err("no encodings".into());
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(format!("train_fraction {} not in (0, 1)", self.train_fraction));
        }
        if let Source::Quadratic { min_disc, max_disc } = self.source {
            if min_disc > max_disc {
                return Err(format!("empty discriminant range [{min_disc}, {max_disc}]"));
            }
        }
        if !self.extrapolation.is_empty() {
            let Source::Quadratic { min_disc, max_disc } = self.source else {
                return Err("extrapolation ranges need a quadratic source".into());
            };
            for r in &self.extrapolation {
                if r.min_disc > r.max_disc {
                    return Err(format!("empty extrapolation range '{}'", r.label));
                }
                if r.min_disc <= max_disc && min_disc <= r.max_disc {
                    return Err(format!("extrapolation range '{}' overlaps the training range", r.label));
                }
            }
        }
        if self.per_group && !self.source.is_snapshot() {
            return Err("per_group needs a snapshot source".into());
        }
        Ok(())
    }

    pub fn feature_length(&self, encoding: Encoding) -> Option<usize> {
        match encoding {
            Encoding::Poly => None,
            Encoding::Zeta => self.zeta_length,
            Encoding::Split => self.split_length,
        }
    }
}
