use serde::{Deserialize, Serialize};

use super::{Classifier, LabeledDataset, MlError};

/// Confusion matrix (rows = true class, columns = predicted class) with the
/// summary scores derived from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub class_names: Vec<String>,
    pub confusion: Vec<Vec<u64>>,
    pub precision: f64,
    pub mcc: f64,
    pub samples: u64,
}

impl EvalReport {
    pub fn from_confusion(class_names: Vec<String>, confusion: Vec<Vec<u64>>) -> Self {
        let samples: u64 = confusion.iter().flatten().sum();
        let correct: u64 = (0..confusion.len()).map(|i| confusion[i][i]).sum();
        let precision = if samples == 0 { 0.0 } else { correct as f64 / samples as f64 };
        let mcc = mcc_from_confusion(&confusion);
        EvalReport { class_names, confusion, precision, mcc, samples }
    }

    /// Adds the counts of `other` (same classes) into `self`.
    pub fn merge(&mut self, other: &EvalReport) {
        for (row, orow) in self.confusion.iter_mut().zip(&other.confusion) {
            for (c, o) in row.iter_mut().zip(orow) {
                *c += o;
            }
        }
        *self = EvalReport::from_confusion(std::mem::take(&mut self.class_names), std::mem::take(&mut self.confusion));
    }
}

/// Multiclass Matthews correlation coefficient. Zero when the denominator
/// vanishes.
pub fn mcc_from_confusion(confusion: &[Vec<u64>]) -> f64 {
    let k = confusion.len();
    let s: f64 = confusion.iter().flatten().map(|&c| c as f64).sum();
    let c: f64 = (0..k).map(|i| confusion[i][i] as f64).sum();
    let t: Vec<f64> = confusion.iter().map(|row| row.iter().map(|&x| x as f64).sum()).collect();
    let p: Vec<f64> = (0..k).map(|j| confusion.iter().map(|row| row[j] as f64).sum()).collect();
    let tp: f64 = t.iter().zip(&p).map(|(a, b)| a * b).sum();
    let tt: f64 = t.iter().map(|a| a * a).sum();
    let pp: f64 = p.iter().map(|a| a * a).sum();
    let denom = ((s * s - pp) * (s * s - tt)).sqrt();
    if denom == 0.0 {
        0.0
    } else {
        ((c * s - tp) / denom).clamp(-1.0, 1.0)
    }
}

pub fn evaluate_predictions(
    truth: &[usize],
    predicted: &[usize],
    class_names: Vec<String>,
) -> Result<EvalReport, MlError> {
    if truth.len() != predicted.len() {
        return Err(MlError::DimensionMismatch { expected: truth.len(), got: predicted.len() });
    }
    let k = class_names.len();
    let mut confusion = vec![vec![0u64; k]; k];
    for (&t, &p) in truth.iter().zip(predicted) {
        if t >= k || p >= k {
            return Err(MlError::LabelOutOfRange { label: t.max(p), classes: k });
        }
        confusion[t][p] += 1;
    }
    Ok(EvalReport::from_confusion(class_names, confusion))
}

pub fn evaluate(model: &dyn Classifier, data: &LabeledDataset) -> Result<EvalReport, MlError> {
    if data.dim() != model.num_features() {
        return Err(MlError::DimensionMismatch { expected: model.num_features(), got: data.dim() });
    }
    let predicted = model.predict(data);
    evaluate_predictions(data.labels(), &predicted, data.class_names.clone())
}
