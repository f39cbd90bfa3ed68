use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::MlError;
use crate::fields::Encoding;

/// Feature rows (dense, row-major) with class indices into `class_names`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    dim: usize,
    features: Vec<f64>,
    labels: Vec<usize>,
    pub encoding: Option<Encoding>,
    pub class_names: Vec<String>,
}

impl LabeledDataset {
    pub fn new(dim: usize, class_names: Vec<String>, encoding: Option<Encoding>) -> Self {
        LabeledDataset { dim, features: Vec::new(), labels: Vec::new(), encoding, class_names }
    }

    pub fn with_capacity(dim: usize, class_names: Vec<String>, encoding: Option<Encoding>, rows: usize) -> Self {
        let mut ds = Self::new(dim, class_names, encoding);
        ds.features.reserve(rows * dim);
        ds.labels.reserve(rows);
        ds
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: &[usize], class_names: Vec<String>) -> Result<Self, MlError> {
        let dim = rows.first().map_or(0, Vec::len);
        let mut ds = Self::with_capacity(dim, class_names, None, rows.len());
        for (row, &label) in rows.iter().zip(labels) {
            ds.push(row, label)?;
        }
        Ok(ds)
    }

    pub fn push(&mut self, row: &[f64], label: usize) -> Result<(), MlError> {
        if row.len() != self.dim {
            return Err(MlError::DimensionMismatch { expected: self.dim, got: row.len() });
        }
        if label >= self.class_names.len() {
            return Err(MlError::LabelOutOfRange { label, classes: self.class_names.len() });
        }
        if let Some(v) = row.iter().find(|v| !v.is_finite()) {
            return Err(MlError::NonFinite(format!("feature value {v}")));
        }
        self.features.extend_from_slice(row);
        self.labels.push(label);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    pub fn distinct_labels(&self) -> usize {
        self.class_counts().iter().filter(|&&c| c > 0).count()
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut out = Self::with_capacity(self.dim, self.class_names.clone(), self.encoding, indices.len());
        for &i in indices {
            out.features.extend_from_slice(self.row(i));
            out.labels.push(self.labels[i]);
        }
        out
    }

    /// Applies `f` to every feature value in place.
    pub fn map_features(&mut self, f: impl Fn(f64) -> f64) {
        for v in &mut self.features {
            *v = f(*v);
        }
    }
}

/// `sign(x) * ln(1 + |x|)`, compressing polynomial coefficients that exceed
/// the exact range of `f64`.
pub fn signed_log(x: f64) -> f64 {
    x.signum() * x.abs().ln_1p()
}

/// Stratified partition of item indices: within each class a seeded shuffle
/// sends `round(fraction * class size)` items to training.
pub fn split_indices(
    labels: &[usize],
    num_classes: usize,
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), MlError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(MlError::InvalidConfig(format!("train fraction {train_fraction} not in (0, 1)")));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); num_classes];
    for (i, &l) in labels.iter().enumerate() {
        by_class[l].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut validation = Vec::new();
    for mut members in by_class {
        members.shuffle(&mut rng);
        let take = (train_fraction * members.len() as f64).round() as usize;
        train.extend_from_slice(&members[..take]);
        validation.extend_from_slice(&members[take..]);
    }
    train.sort_unstable();
    validation.sort_unstable();
    if train.is_empty() || validation.is_empty() {
        return Err(MlError::DegenerateSplit {
            fraction: train_fraction,
            train: train.len(),
            validation: validation.len(),
        });
    }
    Ok((train, validation))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitPair {
    pub train: LabeledDataset,
    pub validation: LabeledDataset,
    pub train_fraction: f64,
    pub seed: u64,
}

pub fn split_dataset(data: &LabeledDataset, train_fraction: f64, seed: u64) -> Result<SplitPair, MlError> {
    let (train, validation) = split_indices(data.labels(), data.num_classes(), train_fraction, seed)?;
    Ok(SplitPair { train: data.subset(&train), validation: data.subset(&validation), train_fraction, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n: usize, classes: usize) -> LabeledDataset {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64]).collect();
        let labels: Vec<usize> = (0..n).map(|i| i % classes).collect();
        LabeledDataset::from_rows(&rows, &labels, (0..classes).map(|c| c.to_string()).collect()).unwrap()
    }

    #[test]
    fn eighty_twenty() {
        let ds = toy(100, 2);
        let split = split_dataset(&ds, 0.8, 3).unwrap();
        assert_eq!((split.train.len(), split.validation.len()), (80, 20));
        assert_eq!(split.train.class_counts(), vec![40, 40]);
    }

    #[test]
    fn partition_is_disjoint_and_exhaustive() {
        let ds = toy(97, 3);
        let (train, val) = split_indices(ds.labels(), 3, 0.3, 11).unwrap();
        let mut all: Vec<usize> = train.iter().chain(&val).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..97).collect::<Vec<_>>());
    }

    #[test]
    fn same_seed_same_partition() {
        let ds = toy(50, 2);
        assert_eq!(split_dataset(&ds, 0.7, 5).unwrap(), split_dataset(&ds, 0.7, 5).unwrap());
        assert_ne!(split_dataset(&ds, 0.7, 5).unwrap(), split_dataset(&ds, 0.7, 6).unwrap());
    }

    #[test]
    fn single_class_split_succeeds() {
        let ds = toy(10, 1);
        let split = split_dataset(&ds, 0.8, 1).unwrap();
        assert_eq!(split.train.distinct_labels(), 1);
    }

    #[test]
    fn degenerate_splits() {
        let ds = toy(1, 1);
        assert!(matches!(split_dataset(&ds, 0.8, 1), Err(MlError::DegenerateSplit { .. })));
        assert!(matches!(split_dataset(&toy(10, 2), 1.0, 1), Err(MlError::InvalidConfig(_))));
    }

    #[test]
    fn push_validates() {
        let mut ds = LabeledDataset::new(2, vec!["a".into(), "b".into()], None);
        assert!(matches!(ds.push(&[1.0], 0), Err(MlError::DimensionMismatch { .. })));
        assert!(matches!(ds.push(&[1.0, 2.0], 2), Err(MlError::LabelOutOfRange { .. })));
        assert!(matches!(ds.push(&[f64::NAN, 2.0], 0), Err(MlError::NonFinite(_))));
    }

    #[test]
    fn signed_log_is_odd_and_monotone() {
        assert_eq!(signed_log(0.0), 0.0);
        assert_eq!(signed_log(-5.0), -signed_log(5.0));
        assert!(signed_log(1.5e17) < 40.0);
        assert!(signed_log(2.0) < signed_log(3.0));
    }
}
