use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Classifier, LabeledDataset, MlError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    #[default]
    CrossEntropy,
    SquaredError,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticConfig {
    pub learning_rate: f64,
    pub max_iterations: usize,
    /// L2 penalty on the non-bias weights.
    pub l2: f64,
    /// Stop once the relative loss decrease falls below this.
    pub tolerance: f64,
    pub standardize: bool,
    pub loss: Loss,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            learning_rate: 1.0,
            max_iterations: 500,
            l2: 1e-4,
            tolerance: 1e-9,
            standardize: true,
            loss: Loss::CrossEntropy,
        }
    }
}

/// One-vs-rest sigmoid models. Binary problems use a single model scoring
/// the second class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    num_features: usize,
    num_classes: usize,
    pub config: LogisticConfig,
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    /// Per model: one weight per standardized feature, then the bias.
    pub weights: Vec<Vec<f64>>,
    /// Objective value per accepted gradient step, per model.
    pub loss_history: Vec<Vec<f64>>,
}

impl LogisticModel {
    fn standardized(&self, row: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(row.iter().zip(&self.means).zip(&self.scales).map(|((x, m), s)| (x - m) / s));
    }

    /// Per-model linear scores for one row.
    pub fn scores(&self, row: &[f64]) -> Vec<f64> {
        let mut z = Vec::with_capacity(row.len());
        self.standardized(row, &mut z);
        self.weights.iter().map(|w| linear(w, &z)).collect()
    }

    /// Weights re-expressed on the raw feature scale: `(w, bias)` per model.
    pub fn raw_weights(&self) -> Vec<(Vec<f64>, f64)> {
        self.weights
            .iter()
            .map(|w| {
                let d = self.num_features;
                let raw: Vec<f64> = (0..d).map(|i| w[i] / self.scales[i]).collect();
                let bias = w[d] - (0..d).map(|i| raw[i] * self.means[i]).sum::<f64>();
                (raw, bias)
            })
            .collect()
    }
}

impl Classifier for LogisticModel {
    fn num_features(&self) -> usize {
        self.num_features
    }

    fn num_classes(&self) -> usize {
        self.num_classes
    }

    fn predict_row(&self, row: &[f64]) -> usize {
        let scores = self.scores(row);
        if self.num_classes == 2 {
            return (scores[0] >= 0.0) as usize;
        }
        let mut best = 0;
        for (c, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = c;
            }
        }
        best
    }
}

fn linear(w: &[f64], x: &[f64]) -> f64 {
    let d = x.len();
    w[d] + w[..d].iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

struct Problem<'a> {
    x: &'a [f64],
    y: Vec<f64>,
    d: usize,
    l2: f64,
    loss: Loss,
}

impl Problem<'_> {
    fn rows(&self) -> usize {
        self.y.len()
    }

    /// Objective and gradient at `w`.
    fn eval(&self, w: &[f64], want_grad: bool) -> (f64, Vec<f64>) {
        let d = self.d;
        let n = self.rows() as f64;
        let (loss, mut grad) = self
            .x
            .par_chunks(d * 1024)
            .zip(self.y.par_chunks(1024))
            .map(|(xs, ys)| {
                let mut loss = 0.0;
                let mut grad = if want_grad { vec![0.0; d + 1] } else { Vec::new() };
                for (row, &y) in xs.chunks(d).zip(ys) {
                    let z = linear(w, row);
                    let (l, dz) = match self.loss {
                        Loss::CrossEntropy => (softplus(z) - y * z, sigmoid(z) - y),
                        Loss::SquaredError => {
                            let p = sigmoid(z);
                            ((p - y) * (p - y), 2.0 * (p - y) * p * (1.0 - p))
                        }
                    };
                    loss += l;
                    if want_grad {
                        for (g, x) in grad.iter_mut().zip(row) {
                            *g += dz * x;
                        }
                        grad[d] += dz;
                    }
                }
                (loss, grad)
            })
            .reduce(
                || (0.0, if want_grad { vec![0.0; d + 1] } else { Vec::new() }),
                |(la, mut ga), (lb, gb)| {
                    for (a, b) in ga.iter_mut().zip(&gb) {
                        *a += b;
                    }
                    (la + lb, ga)
                },
            );
        let penalty: f64 = w[..d].iter().map(|v| v * v).sum::<f64>() * self.l2 / 2.0;
        for g in grad.iter_mut() {
            *g /= n;
        }
        for i in 0..grad.len().min(d) {
            grad[i] += self.l2 * w[i];
        }
        (loss / n + penalty, grad)
    }
}

/// Full-batch gradient descent with step halving: a step is accepted only if
/// it lowers the objective, so the recorded loss is non-increasing.
fn fit_binary(problem: &Problem, config: &LogisticConfig) -> Result<(Vec<f64>, Vec<f64>), MlError> {
    let mut w = vec![0.0; problem.d + 1];
    let (mut loss, mut grad) = problem.eval(&w, true);
    if !loss.is_finite() {
        return Err(MlError::NonFinite(format!("initial loss {loss}")));
    }
    let mut history = vec![loss];
    let mut rate = config.learning_rate;
    for _ in 0..config.max_iterations {
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(MlError::NonFinite(format!("gradient at loss {loss}")));
        }
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = w.iter().zip(&grad).map(|(a, g)| a - rate * g).collect();
            let (trial_loss, _) = problem.eval(&trial, false);
            if trial_loss.is_finite() && trial_loss <= loss {
                accepted = Some((trial, trial_loss));
                break;
            }
            rate /= 2.0;
        }
        let Some((next, next_loss)) = accepted else { break };
        let improvement = loss - next_loss;
        w = next;
        loss = next_loss;
        history.push(loss);
        if improvement <= config.tolerance * loss.abs().max(1e-12) {
            break;
        }
        rate *= 1.25;
        grad = problem.eval(&w, true).1;
    }
    Ok((w, history))
}

pub fn train_logistic(data: &LabeledDataset, config: &LogisticConfig) -> Result<LogisticModel, MlError> {
    if data.is_empty() {
        return Err(MlError::EmptyDataset);
    }
    let classes = data.distinct_labels();
    if classes < 2 {
        return Err(MlError::SingleClass(classes));
    }
    if config.learning_rate.is_nan() || config.learning_rate <= 0.0 || !config.l2.is_finite() || config.l2 < 0.0 {
        return Err(MlError::InvalidConfig(format!("learning rate {} l2 {}", config.learning_rate, config.l2)));
    }
    let d = data.dim();
    let n = data.len();
    let (means, scales) = if config.standardize {
        let mut means = vec![0.0; d];
        let mut sq = vec![0.0; d];
        for i in 0..n {
            for (j, &v) in data.row(i).iter().enumerate() {
                means[j] += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n as f64);
        for i in 0..n {
            for (j, &v) in data.row(i).iter().enumerate() {
                sq[j] += (v - means[j]) * (v - means[j]);
            }
        }
        let scales = sq.iter().map(|s| {
            let sd = (s / n as f64).sqrt();
            if sd > 0.0 && sd.is_finite() {
                sd
            } else {
                1.0
            }
        });
        (means, scales.collect())
    } else {
        (vec![0.0; d], vec![1.0; d])
    };
    let mut x = Vec::with_capacity(n * d);
    for i in 0..n {
        x.extend(data.row(i).iter().zip(&means).zip(&scales).map(|((v, m), s)| (v - m) / s));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(MlError::NonFinite("standardized features".into()));
    }
    let k = data.num_classes();
    let targets: Vec<usize> = if k == 2 { vec![1] } else { (0..k).collect() };
    let mut weights = Vec::new();
    let mut loss_history = Vec::new();
    for target in targets {
        let y = data.labels().iter().map(|&l| (l == target) as u8 as f64).collect();
        let problem = Problem { x: &x, y, d, l2: config.l2, loss: config.loss };
        let (w, history) = fit_binary(&problem, config)?;
        weights.push(w);
        loss_history.push(history);
    }
    Ok(LogisticModel { num_features: d, num_classes: k, config: config.clone(), means, scales, weights, loss_history })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ml::evaluate;
    use proptest::prelude::{any, prop_assert, proptest, ProptestConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|i| i.to_string()).collect()
    }

    fn separable(n: usize, seed: u64) -> LabeledDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ds = LabeledDataset::new(2, names(2), None);
        for _ in 0..n {
            let x: f64 = rng.gen_range(-5.0..5.0);
            let noise: f64 = rng.gen_range(-1.0..1.0);
            ds.push(&[x, noise], (x > 0.5) as usize).unwrap();
        }
        ds
    }

    #[test]
    fn separable_one_dimensional() {
        let model = train_logistic(&separable(500, 1), &LogisticConfig::default()).unwrap();
        let report = evaluate(&model, &separable(300, 2)).unwrap();
        assert!(report.precision > 0.97, "{}", report.precision);
        let (raw, bias) = &model.raw_weights()[0];
        let boundary = -bias / raw[0];
        assert!((boundary - 0.5).abs() < 0.2, "{boundary}");
    }

    #[test]
    fn squared_error_also_learns() {
        let cfg = LogisticConfig { loss: Loss::SquaredError, ..Default::default() };
        let model = train_logistic(&separable(500, 3), &cfg).unwrap();
        assert!(evaluate(&model, &separable(300, 4)).unwrap().precision > 0.95);
    }

    #[test]
    fn loss_is_monotone() {
        let model =
            train_logistic(&separable(200, 5), &LogisticConfig { learning_rate: 50.0, ..Default::default() }).unwrap();
        for history in &model.loss_history {
            assert!(history.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn huge_unstandardized_features_stay_finite() {
        let rows: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64 * 1e17]).collect();
        let labels: Vec<usize> = (0..50).map(|i| (i >= 25) as usize).collect();
        let ds = LabeledDataset::from_rows(&rows, &labels, names(2)).unwrap();
        let cfg = LogisticConfig { standardize: false, ..Default::default() };
        let model = train_logistic(&ds, &cfg).unwrap();
        assert!(model.weights[0].iter().all(|w| w.is_finite()));
    }

    #[test]
    fn one_vs_rest_three_classes() {
        let rows: Vec<Vec<f64>> = (0..300).map(|i| vec![(i % 3) as f64, ((i % 3) == 1) as u8 as f64]).collect();
        let labels: Vec<usize> = (0..300).map(|i| i % 3).collect();
        let ds = LabeledDataset::from_rows(&rows, &labels, names(3)).unwrap();
        let model = train_logistic(&ds, &LogisticConfig::default()).unwrap();
        assert_eq!(model.weights.len(), 3);
        assert_eq!(evaluate(&model, &ds).unwrap().precision, 1.0);
    }

    #[test]
    fn rejects_single_class() {
        let ds = LabeledDataset::from_rows(&[vec![1.0], vec![2.0]], &[0, 0], names(2)).unwrap();
        assert!(matches!(train_logistic(&ds, &LogisticConfig::default()), Err(MlError::SingleClass(1))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn history_never_increases(seed in any::<u64>(), rate in 0.01f64..100.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows: Vec<Vec<f64>> = (0..30).map(|_| vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]).collect();
            let labels: Vec<usize> = (0..30).map(|i| (i % 2 == 0 || rng.gen_bool(0.3)) as usize).collect();
            let ds = LabeledDataset::from_rows(&rows, &labels, names(2)).unwrap();
            let cfg = LogisticConfig { learning_rate: rate, max_iterations: 30, ..Default::default() };
            let model = train_logistic(&ds, &cfg).unwrap();
            for h in &model.loss_history {
                prop_assert!(h.windows(2).all(|w| w[1] <= w[0]));
            }
        }

        #[test]
        fn sigmoid_and_softplus_agree(z in -700.0f64..700.0) {
            let s = sigmoid(z);
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert!(softplus(z) >= z.max(0.0) - 1e-12);
        }
    }
}
