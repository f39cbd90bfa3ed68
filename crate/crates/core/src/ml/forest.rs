use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Classifier, LabeledDataset, MlError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub num_trees: usize,
    /// Split candidates examined per node; `None` means `ceil(sqrt(m))`.
    /// Every feature is one candidate and each value of a categorical
    /// feature adds one more, so `m == dim` when categorical splits are off.
    pub features_per_split: Option<usize>,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
    /// Upper bound on candidate thresholds per feature (at most 256).
    pub max_bins: usize,
    /// Features with at least three and at most this many distinct training
    /// values also get one-vs-rest equality splits; 0 disables them.
    pub categorical_max_values: usize,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            num_trees: 200,
            features_per_split: None,
            min_leaf: 1,
            max_depth: None,
            max_bins: 256,
            categorical_max_values: 0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
    /// Rows whose feature equals `value` go left.
    Equal {
        feature: u32,
        value: f64,
        left: u32,
        right: u32,
    },
    Leaf {
        class: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    fn predict(&self, row: &[f64]) -> usize {
        let mut at = 0usize;
        loop {
            match self.nodes[at] {
                Node::Leaf { class } => return class as usize,
                Node::Split { feature, threshold, left, right } => {
                    at = if row[feature as usize] <= threshold { left as usize } else { right as usize };
                }
                Node::Equal { feature, value, left, right } => {
                    at = if row[feature as usize] == value { left as usize } else { right as usize };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } | Node::Equal { left, right, .. } => {
                    1 + go(nodes, left as usize).max(go(nodes, right as usize))
                }
            }
        }
        go(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    num_features: usize,
    num_classes: usize,
    pub config: ForestConfig,
    pub trees: Vec<Tree>,
}

impl ForestModel {
    /// Per-class vote counts for one row.
    pub fn votes(&self, row: &[f64]) -> Vec<usize> {
        let mut votes = vec![0; self.num_classes];
        for tree in &self.trees {
            votes[tree.predict(row)] += 1;
        }
        votes
    }
}

impl Classifier for ForestModel {
    fn num_features(&self) -> usize {
        self.num_features
    }

    fn num_classes(&self) -> usize {
        self.num_classes
    }

    fn predict_row(&self, row: &[f64]) -> usize {
        let votes = self.votes(row);
        let mut best = 0;
        for (c, &v) in votes.iter().enumerate() {
            if v > votes[best] {
                best = c;
            }
        }
        best
    }
}

/// Training values quantized per feature; bin `b` of feature `f` holds values
/// in `(edges[f][b-1], edges[f][b]]`.
struct Binned {
    n: usize,
    bins: Vec<u8>,
    edges: Vec<Vec<f64>>,
}

impl Binned {
    fn new(data: &LabeledDataset, max_bins: usize) -> Self {
        let n = data.len();
        let dim = data.dim();
        let columns: Vec<(Vec<u8>, Vec<f64>)> = (0..dim)
            .into_par_iter()
            .map(|f| {
                let column: Vec<f64> = (0..n).map(|i| data.row(i)[f]).collect();
                let mut uniq = column.clone();
                uniq.sort_unstable_by(f64::total_cmp);
                uniq.dedup();
                let edges: Vec<f64> = if uniq.len() <= max_bins {
                    uniq
                } else {
                    (0..max_bins).map(|b| uniq[(b + 1) * uniq.len() / max_bins - 1]).collect()
                };
                let bins = column.iter().map(|v| edges.partition_point(|e| e < v).min(edges.len() - 1) as u8).collect();
                (bins, edges)
            })
            .collect();
        let mut bins = Vec::with_capacity(n * dim);
        let mut edges = Vec::with_capacity(dim);
        for (b, e) in columns {
            bins.extend_from_slice(&b);
            edges.push(e);
        }
        Binned { n, bins, edges }
    }

    fn column(&self, f: usize) -> &[u8] {
        &self.bins[f * self.n..(f + 1) * self.n]
    }
}

/// A split family: all thresholds of a feature, or equality with one bin.
#[derive(Clone, Copy)]
struct Candidate {
    feature: u32,
    equal: Option<u8>,
}

struct Scratch {
    hist: Vec<u32>,
    node_bins: Vec<u8>,
    candidates: Vec<Candidate>,
}

struct Grower<'a> {
    binned: &'a Binned,
    candidates: &'a [Candidate],
    labels: &'a [usize],
    k: usize,
    mtry: usize,
    min_leaf: usize,
    max_depth: usize,
}

struct BestSplit {
    feature: usize,
    bin: u8,
    equal: bool,
    score: f64,
}

impl Grower<'_> {
    fn grow(&self, rng: &mut ChaCha8Rng) -> Tree {
        let n = self.binned.n;
        let mut sample: Vec<u32> = (0..n).map(|_| rng.gen_range(0..n as u32)).collect();
        sample.sort_unstable();
        let mut scratch = Scratch {
            hist: vec![0; 256 * self.k],
            node_bins: Vec::with_capacity(n),
            candidates: self.candidates.to_vec(),
        };
        let mut nodes = vec![Node::Leaf { class: 0 }];
        let mut stack = vec![(0usize, 0usize, n, 0usize)];
        let mut counts = vec![0usize; self.k];
        while let Some((id, start, end, depth)) = stack.pop() {
            let members = &mut sample[start..end];
            counts.iter_mut().for_each(|c| *c = 0);
            for &i in members.iter() {
                counts[self.labels[i as usize]] += 1;
            }
            let majority = majority(&counts);
            let size = end - start;
            if counts[majority] == size || size < 2 * self.min_leaf || depth >= self.max_depth {
                nodes[id] = Node::Leaf { class: majority as u32 };
                continue;
            }
            let Some(best) = self.best_split(members, &counts, rng, &mut scratch) else {
                nodes[id] = Node::Leaf { class: majority as u32 };
                continue;
            };
            let column = self.binned.column(best.feature);
            let mut mid = 0;
            for j in 0..members.len() {
                let b = column[members[j] as usize];
                if (best.equal && b == best.bin) || (!best.equal && b <= best.bin) {
                    members.swap(mid, j);
                    mid += 1;
                }
            }
            let left = nodes.len();
            nodes.push(Node::Leaf { class: 0 });
            nodes.push(Node::Leaf { class: 0 });
            let (feature, edge) = (best.feature as u32, self.binned.edges[best.feature][best.bin as usize]);
            let (left, right) = (left as u32, left as u32 + 1);
            nodes[id] = if best.equal {
                Node::Equal { feature, value: edge, left, right }
            } else {
                Node::Split { feature, threshold: edge, left, right }
            };
            let left = left as usize;
            stack.push((left + 1, start + mid, end, depth + 1));
            stack.push((left, start, start + mid, depth + 1));
        }
        Tree { nodes }
    }

    /// Samples candidates without replacement until `mtry` non-constant ones
    /// have been scored, and returns the lowest-Gini admissible split.
    fn best_split(
        &self,
        members: &[u32],
        counts: &[usize],
        rng: &mut ChaCha8Rng,
        scratch: &mut Scratch,
    ) -> Option<BestSplit> {
        let mut best: Option<BestSplit> = None;
        let mut informative = 0;
        let dim = scratch.candidates.len();
        for drawn in 0..dim {
            if informative >= self.mtry {
                break;
            }
            let pick = rng.gen_range(drawn..dim);
            scratch.candidates.swap(drawn, pick);
            let candidate = scratch.candidates[drawn];
            let f = candidate.feature as usize;
            let column = self.binned.column(f);
            let found = match candidate.equal {
                Some(bin) => self.equality_split(column, bin, members, counts, &mut scratch.hist),
                None => self.threshold_split(column, members, counts, scratch),
            };
            let Some((bin, score)) = found else { continue };
            informative += 1;
            let Some(bin) = bin else { continue };
            if best.as_ref().is_none_or(|s| score > s.score + 1e-12) {
                best = Some(BestSplit { feature: f, bin, equal: candidate.equal.is_some(), score });
            }
        }
        best
    }

    fn gini_gain(&self, left: &[f64], left_n: f64, counts: &[usize], total: f64) -> Option<f64> {
        let right_n = total - left_n;
        let min_leaf = self.min_leaf as f64;
        if left_n < min_leaf || right_n < min_leaf || left_n == 0.0 || right_n == 0.0 {
            return None;
        }
        let mut score = 0.0;
        for (c, &l) in left.iter().enumerate() {
            let r = counts[c] as f64 - l;
            score += l * l / left_n + r * r / right_n;
        }
        Some(score)
    }

    /// `None` when the feature is constant on the node, otherwise the best
    /// admissible threshold bin (if any) with its score.
    fn threshold_split(
        &self,
        column: &[u8],
        members: &[u32],
        counts: &[usize],
        scratch: &mut Scratch,
    ) -> Option<(Option<u8>, f64)> {
        let k = self.k;
        let total = members.len() as f64;
        scratch.node_bins.clear();
        let (mut lo, mut hi) = (u8::MAX, 0u8);
        for &i in members {
            let b = column[i as usize];
            lo = lo.min(b);
            hi = hi.max(b);
            scratch.node_bins.push(b);
        }
        if lo == hi {
            return None;
        }
        let (lo, hi) = (lo as usize, hi as usize);
        let hist = &mut scratch.hist[lo * k..(hi + 1) * k];
        hist.iter_mut().for_each(|h| *h = 0);
        for (&b, &i) in scratch.node_bins.iter().zip(members) {
            hist[(b as usize - lo) * k + self.labels[i as usize]] += 1;
        }
        let mut left = vec![0f64; k];
        let mut left_n = 0f64;
        let mut best: (Option<u8>, f64) = (None, 0.0);
        for b in 0..(hi - lo) {
            for c in 0..k {
                let h = hist[b * k + c] as f64;
                left[c] += h;
                left_n += h;
            }
            if let Some(score) = self.gini_gain(&left, left_n, counts, total) {
                if best.0.is_none() || score > best.1 + 1e-12 {
                    best = (Some((lo + b) as u8), score);
                }
            }
        }
        Some(best)
    }

    fn equality_split(
        &self,
        column: &[u8],
        bin: u8,
        members: &[u32],
        counts: &[usize],
        hist: &mut [u32],
    ) -> Option<(Option<u8>, f64)> {
        let k = self.k;
        let hist = &mut hist[..k];
        hist.iter_mut().for_each(|h| *h = 0);
        let mut inside = 0usize;
        for &i in members {
            if column[i as usize] == bin {
                hist[self.labels[i as usize]] += 1;
                inside += 1;
            }
        }
        if inside == 0 || inside == members.len() {
            return None;
        }
        let left: Vec<f64> = hist.iter().map(|&h| h as f64).collect();
        let score = self.gini_gain(&left, inside as f64, counts, members.len() as f64);
        Some((score.map(|_| bin), score.unwrap_or(0.0)))
    }
}

fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (c, &v) in counts.iter().enumerate() {
        if v > counts[best] {
            best = c;
        }
    }
    best
}

/// Bagged CART forest with Gini splits, optionally with equality splits on
/// low-cardinality features. Tree `t` draws from its own ChaCha
/// stream, so results depend only on the data and `config.seed`.
pub fn train_forest(data: &LabeledDataset, config: &ForestConfig) -> Result<ForestModel, MlError> {
    if data.is_empty() {
        return Err(MlError::EmptyDataset);
    }
    let classes = data.distinct_labels();
    if classes < 2 {
        return Err(MlError::SingleClass(classes));
    }
    if data.dim() == 0 {
        return Err(MlError::InvalidConfig("no features".into()));
    }
    if config.num_trees == 0 || config.min_leaf == 0 || !(2..=256).contains(&config.max_bins) {
        return Err(MlError::InvalidConfig(format!(
            "num_trees {} min_leaf {} max_bins {}",
            config.num_trees, config.min_leaf, config.max_bins
        )));
    }
    let binned = Binned::new(data, config.max_bins);
    let mut candidates = Vec::new();
    for (f, edges) in binned.edges.iter().enumerate() {
        let feature = f as u32;
        if (3..=config.categorical_max_values).contains(&edges.len()) {
            candidates.extend((0..edges.len()).map(|b| Candidate { feature, equal: Some(b as u8) }));
        }
        candidates.push(Candidate { feature, equal: None });
    }
    let mtry = config
        .features_per_split
        .unwrap_or_else(|| (candidates.len() as f64).sqrt().ceil() as usize)
        .clamp(1, candidates.len());
    let grower = Grower {
        binned: &binned,
        candidates: &candidates,
        labels: data.labels(),
        k: data.num_classes(),
        mtry,
        min_leaf: config.min_leaf,
        max_depth: config.max_depth.unwrap_or(usize::MAX),
    };
    let trees = (0..config.num_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(t as u64);
            grower.grow(&mut rng)
        })
        .collect();
    Ok(ForestModel { num_features: data.dim(), num_classes: data.num_classes(), config: config.clone(), trees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ml::evaluate;
    use proptest::prelude::{any, prop_assert_eq, proptest, ProptestConfig};

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|i| i.to_string()).collect()
    }

    fn xor(n: usize, seed: u64) -> LabeledDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ds = LabeledDataset::new(2, names(2), None);
        for _ in 0..n {
            let (a, b) = (rng.gen_bool(0.5), rng.gen_bool(0.5));
            let row = [a as u8 as f64 + rng.gen_range(-0.2..0.2), b as u8 as f64 + rng.gen_range(-0.2..0.2)];
            ds.push(&row, (a ^ b) as usize).unwrap();
        }
        ds
    }

    fn small() -> ForestConfig {
        ForestConfig { num_trees: 30, seed: 7, ..Default::default() }
    }

    #[test]
    fn learns_xor() {
        let model = train_forest(&xor(400, 1), &small()).unwrap();
        let report = evaluate(&model, &xor(200, 2)).unwrap();
        assert!(report.precision > 0.95, "{}", report.precision);
    }

    #[test]
    fn random_labels_give_chance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut train = LabeledDataset::new(5, names(2), None);
        let mut test = LabeledDataset::new(5, names(2), None);
        for i in 0..3000 {
            let row: Vec<f64> = (0..5).map(|_| rng.gen_range(0..10) as f64).collect();
            let ds = if i < 2000 { &mut train } else { &mut test };
            ds.push(&row, rng.gen_range(0..2)).unwrap();
        }
        let report = evaluate(&train_forest(&train, &small()).unwrap(), &test).unwrap();
        assert!((report.precision - 0.5).abs() < 0.06, "{}", report.precision);
        assert!(report.mcc.abs() < 0.1);
    }

    #[test]
    fn threshold_on_one_feature() {
        let rows: Vec<Vec<f64>> = (0..100).map(|i| vec![i as f64, 0.0]).collect();
        let labels: Vec<usize> = (0..100).map(|i| (i >= 37) as usize).collect();
        let ds = LabeledDataset::from_rows(&rows, &labels, names(2)).unwrap();
        let model = train_forest(&ds, &ForestConfig { num_trees: 25, ..small() }).unwrap();
        let wrong = (0..100).filter(|&i| model.predict_row(&rows[i]) != labels[i]).count();
        assert!(wrong <= 1, "{wrong} mistakes");
    }

    #[test]
    fn many_distinct_values_are_binned() {
        let rows: Vec<Vec<f64>> = (0..5000).map(|i| vec![(i * 7919 % 5000) as f64]).collect();
        let labels: Vec<usize> = rows.iter().map(|r| (r[0] >= 2500.0) as usize).collect();
        let ds = LabeledDataset::from_rows(&rows, &labels, names(2)).unwrap();
        let model = train_forest(&ds, &ForestConfig { num_trees: 3, ..small() }).unwrap();
        let report = evaluate(&model, &ds).unwrap();
        assert!(report.precision > 0.99);
    }

    #[test]
    fn three_classes() {
        let rows: Vec<Vec<f64>> = (0..300).map(|i| vec![(i % 3) as f64 * 10.0 + (i % 7) as f64]).collect();
        let labels: Vec<usize> = (0..300).map(|i| i % 3).collect();
        let ds = LabeledDataset::from_rows(&rows, &labels, names(3)).unwrap();
        let model = train_forest(&ds, &small()).unwrap();
        assert_eq!(evaluate(&model, &ds).unwrap().precision, 1.0);
    }

    #[test]
    fn rejects_single_class_and_bad_config() {
        let ds = LabeledDataset::from_rows(&[vec![1.0], vec![2.0]], &[1, 1], names(2)).unwrap();
        assert!(matches!(train_forest(&ds, &small()), Err(MlError::SingleClass(1))));
        let ds = xor(20, 1);
        let bad = ForestConfig { num_trees: 0, ..small() };
        assert!(matches!(train_forest(&ds, &bad), Err(MlError::InvalidConfig(_))));
    }

    #[test]
    fn serde_round_trip_preserves_predictions() {
        let ds = xor(200, 4);
        let model = train_forest(&ds, &small()).unwrap();
        let json = serde_json::to_string(&model).unwrap();
        let back: ForestModel = serde_json::from_str(&json).unwrap();
        assert_eq!(model, back);
        assert_eq!(model.predict(&ds), back.predict(&ds));
    }

    #[test]
    fn max_depth_limits_trees() {
        let model = train_forest(&xor(300, 5), &ForestConfig { max_depth: Some(2), ..small() }).unwrap();
        assert!(model.trees.iter().all(|t| t.depth() <= 2));
    }

    /// Integer features in 0..6; the label is whether any of the first three
    /// equals 2, which thresholds can only express through deep trees.
    fn any_equals(n: usize, seed: u64) -> LabeledDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ds = LabeledDataset::new(8, names(2), None);
        for _ in 0..n {
            let row: Vec<f64> = (0..8).map(|_| rng.gen_range(0..6) as f64).collect();
            let label = row[..3].contains(&2.0) as usize;
            ds.push(&row, label).unwrap();
        }
        ds
    }

    #[test]
    fn equality_splits_on_categorical_features() {
        let cfg = ForestConfig { categorical_max_values: 8, ..small() };
        let model = train_forest(&any_equals(1500, 1), &cfg).unwrap();
        let equal = model.trees.iter().flat_map(|t| &t.nodes).filter(|n| matches!(n, Node::Equal { .. })).count();
        assert!(equal > 0);
        let report = evaluate(&model, &any_equals(500, 2)).unwrap();
        assert!(report.precision > 0.97, "{}", report.precision);
        let plain = train_forest(&any_equals(1500, 1), &small()).unwrap();
        assert!(plain.trees.iter().flat_map(|t| &t.nodes).all(|n| !matches!(n, Node::Equal { .. })));
    }

    #[test]
    fn unseen_category_goes_right() {
        let tree = Tree {
            nodes: vec![
                Node::Equal { feature: 0, value: 2.0, left: 1, right: 2 },
                Node::Leaf { class: 1 },
                Node::Leaf { class: 0 },
            ],
        };
        assert_eq!(tree.predict(&[2.0]), 1);
        assert_eq!(tree.predict(&[2.5]), 0);
        assert_eq!(tree.depth(), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn categorical_invariant_under_monotone_transform(seed in any::<u64>(), data_seed in 0u64..50) {
            let ds = any_equals(60, data_seed);
            let mut warped = ds.clone();
            warped.map_features(|x| x * x * x - 4.0);
            let cfg = ForestConfig { num_trees: 4, categorical_max_values: 8, seed, ..Default::default() };
            let a = train_forest(&ds, &cfg).unwrap();
            let b = train_forest(&warped, &cfg).unwrap();
            prop_assert_eq!(a.predict(&ds), b.predict(&warped));
        }

        #[test]
        fn deterministic_given_seed(seed in any::<u64>(), data_seed in 0u64..50) {
            let ds = xor(40, data_seed);
            let cfg = ForestConfig { num_trees: 4, seed, ..Default::default() };
            let a = train_forest(&ds, &cfg).unwrap();
            let b = train_forest(&ds, &cfg).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn invariant_under_monotone_transform(seed in any::<u64>(), data_seed in 0u64..50) {
            let ds = xor(40, data_seed);
            let mut warped = ds.clone();
            warped.map_features(|x| x.exp() * 3.0 - 1.0);
            let cfg = ForestConfig { num_trees: 4, seed, ..Default::default() };
            let a = train_forest(&ds, &cfg).unwrap();
            let b = train_forest(&warped, &cfg).unwrap();
            prop_assert_eq!(a.predict(&ds), b.predict(&warped));
        }
    }
}
