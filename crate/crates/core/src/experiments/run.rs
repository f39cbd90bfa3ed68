use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::census::class_numbers;
use super::config::{ClassifierKind, ExperimentConfig, Invariant, RangeSpec, Source};
use super::report::ResultRow;
use super::ExperimentError;
use crate::fields::{encode, unit_rank, Encoding, NumberField, SPLIT_LENGTH, ZETA_LENGTH};
use crate::ingest::{balance_sample, read_snapshot};
use crate::ml::{
    evaluate, evaluate_predictions, signed_log, split_indices, train_forest, train_logistic, Classifier, EvalReport,
    LabeledDataset, Model, ModelFile,
};
use crate::quadratic::{split_vector_quadratic, zeta_coeffs_quadratic, QuadraticField};

/// Rows featurized per parallel batch.
const CHUNK: usize = 4096;

/// Shared settings for experiment runs.
#[derive(Debug, Clone, Default)]
pub struct RunContext {
    /// Class-number tables are cached here when set.
    pub cache_dir: Option<PathBuf>,
    /// Relative snapshot paths resolve against this directory.
    pub base_dir: PathBuf,
    /// Progress lines on stderr.
    pub verbose: bool,
}

impl RunContext {
    fn note(&self, start: Instant, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("[{:>8.1}s] {}", start.elapsed().as_secs_f64(), msg.as_ref());
        }
    }

    fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }
}

/// A field as the harness sees it: quadratic fields stay as `(D, h)` pairs
/// so that large ranges need no polynomial objects.
#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Quadratic { disc: i64, class_number: u64 },
    Field(NumberField),
}

impl Item {
    pub fn label(&self, invariant: Invariant) -> Option<String> {
        match (self, invariant) {
            (Item::Quadratic { .. }, Invariant::Degree) => Some("2".into()),
            (Item::Quadratic { disc, .. }, Invariant::Rank) => Some(if *disc > 0 { "1" } else { "0" }.into()),
            (Item::Quadratic { .. }, Invariant::GaloisGroup) => Some("C2".into()),
            (Item::Quadratic { class_number, .. }, Invariant::ClassNumber) => Some(class_number.to_string()),
            (Item::Quadratic { class_number, .. }, Invariant::ClassNumberMod3) => Some(mod3(*class_number)),
            (Item::Field(f), Invariant::Degree) => Some(f.degree.to_string()),
            (Item::Field(f), Invariant::Rank) => Some(unit_rank(f.signature).to_string()),
            (Item::Field(f), Invariant::GaloisGroup) => Some(f.galois_group.clone()),
            (Item::Field(f), Invariant::ClassNumber) => f.class_number.map(|h| h.to_string()),
            (Item::Field(f), Invariant::ClassNumberMod3) => f.class_number.map(mod3),
        }
    }

    fn degree(&self) -> usize {
        match self {
            Item::Quadratic { .. } => 2,
            Item::Field(f) => f.degree as usize,
        }
    }

    fn group(&self) -> &str {
        match self {
            Item::Quadratic { .. } => "C2",
            Item::Field(f) => &f.galois_group,
        }
    }

    /// Feature row, or `None` for fields with uncertain local data when
    /// those are excluded.
    pub fn features(
        &self,
        encoding: Encoding,
        cfg: &ExperimentConfig,
        poly_width: usize,
    ) -> Result<Option<Vec<f64>>, ExperimentError> {
        let mut row: Vec<f64> = match (self, encoding) {
            (Item::Quadratic { disc, .. }, Encoding::Zeta) => {
                zeta_coeffs_quadratic(*disc, cfg.zeta_length.unwrap_or(ZETA_LENGTH))?
                    .into_iter()
                    .map(|a| a as f64)
                    .collect()
            }
            (Item::Quadratic { disc, .. }, Encoding::Split) => {
                split_vector_quadratic(*disc, cfg.split_length.unwrap_or(SPLIT_LENGTH))?
                    .into_iter()
                    .map(f64::from)
                    .collect()
            }
            (Item::Quadratic { disc, .. }, Encoding::Poly) => {
                let q = QuadraticField::from_discriminant(*disc)?;
                let coeffs = q.defining_poly().coeffs().to_vec();
                coeffs[..coeffs.len() - 1].iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
            }
            (Item::Field(f), Encoding::Poly) => {
                if !f.defining_poly.is_monic() {
                    return Err(crate::fields::FieldError::NotMonic.into());
                }
                let coeffs = f.defining_poly.coeffs();
                coeffs[..coeffs.len() - 1].iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
            }
            (Item::Field(f), enc) => {
                let v = encode(f, enc, cfg.feature_length(enc))?;
                if v.is_uncertain() && !cfg.include_uncertain {
                    return Ok(None);
                }
                v.to_f64()
            }
        };
        if encoding == Encoding::Poly {
            row.resize(poly_width, 0.0);
            if cfg.signed_log {
                row.iter_mut().for_each(|x| *x = signed_log(*x));
            }
        }
        Ok(Some(row))
    }
}

fn mod3(h: u64) -> String {
    if h.is_multiple_of(3) { "divisible" } else { "not_divisible" }.to_string()
}

/// Sorts numerically when every label is an integer.
fn sort_labels(labels: &mut [String]) {
    if labels.iter().all(|l| l.parse::<u64>().is_ok()) {
        labels.sort_by_key(|l| l.parse::<u64>().unwrap());
    } else {
        labels.sort();
    }
}

/// The labeled, balanced pool for one (group of an) experiment.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub group: Option<String>,
    pub class_names: Vec<String>,
    pub items: Vec<Item>,
    pub labels: Vec<usize>,
}

impl Prepared {
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.class_names.len()];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    fn poly_width(&self) -> usize {
        self.items.iter().map(Item::degree).max().unwrap_or(0)
    }

    /// Feature rows for `indices` (order preserved), skipping excluded fields.
    pub fn featurize(
        &self,
        indices: &[usize],
        encoding: Encoding,
        cfg: &ExperimentConfig,
    ) -> Result<LabeledDataset, ExperimentError> {
        let poly_width = self.poly_width();
        let mut ds: Option<LabeledDataset> = None;
        for chunk in indices.chunks(CHUNK) {
            let rows: Vec<Option<Vec<f64>>> = chunk
                .par_iter()
                .map(|&i| self.items[i].features(encoding, cfg, poly_width))
                .collect::<Result<_, _>>()?;
            for (row, &i) in rows.iter().zip(chunk) {
                let Some(row) = row else { continue };
                let d = ds.get_or_insert_with(|| {
                    LabeledDataset::with_capacity(row.len(), self.class_names.clone(), Some(encoding), indices.len())
                });
                d.push(row, self.labels[i])?;
            }
        }
        Ok(ds.unwrap_or_else(|| LabeledDataset::new(0, self.class_names.clone(), Some(encoding))))
    }
}

fn load_items(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Vec<Item>, ExperimentError> {
    match &cfg.source {
        Source::Quadratic { min_disc, max_disc } => Ok(class_numbers(*min_disc, *max_disc, ctx.cache_dir.as_deref())?
            .into_iter()
            .map(|(disc, class_number)| Item::Quadratic { disc, class_number })
            .collect()),
        Source::Snapshot { path, degrees, galois } => {
            let path = ctx.resolve(path);
            if !path.exists() {
                return Err(ExperimentError::Source(format!("snapshot {} not found", path.display())));
            }
            Ok(read_snapshot(&path)?
                .into_iter()
                .filter(|f| degrees.is_empty() || degrees.contains(&f.degree))
                .filter(|f| galois.is_empty() || galois.contains(&f.galois_group))
                .map(Item::Field)
                .collect())
        }
    }
}

fn label_pool(group: Option<String>, items: Vec<Item>, cfg: &ExperimentConfig) -> Result<Prepared, ExperimentError> {
    let labeled: Vec<(Item, String)> =
        items.into_iter().filter_map(|it| it.label(cfg.invariant).map(|l| (it, l))).collect();
    let class_names = if cfg.classes.is_empty() {
        let mut seen: Vec<String> = labeled.iter().map(|(_, l)| l.clone()).collect();
        seen.sort();
        seen.dedup();
        sort_labels(&mut seen);
        seen
    } else {
        cfg.classes.clone()
    };
    let index: BTreeMap<&str, usize> = class_names.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let mut by_class: BTreeMap<usize, Vec<Item>> = BTreeMap::new();
    for (item, label) in labeled {
        if let Some(&c) = index.get(label.as_str()) {
            by_class.entry(c).or_default().push(item);
        }
    }
    for (c, name) in class_names.iter().enumerate() {
        if !by_class.contains_key(&c) {
            return Err(ExperimentError::ZeroSupport { class: name.clone(), group });
        }
    }
    if class_names.len() < 2 {
        return Err(ExperimentError::Source(format!("need at least two classes, found {class_names:?}")));
    }
    let target = if cfg.balance_to_smallest { by_class.values().map(Vec::len).min() } else { cfg.balance_per_class };
    if let Some(target) = target {
        by_class = balance_sample(&by_class, target, cfg.seed);
    }
    let mut items = Vec::new();
    let mut labels = Vec::new();
    for (c, members) in by_class {
        labels.extend(std::iter::repeat_n(c, members.len()));
        items.extend(members);
    }
    Ok(Prepared { group, class_names, items, labels })
}

/// Loads, labels, filters and balances the experiment's fields, split into
/// Galois groups when `per_group` is set.
pub fn prepare(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Vec<Prepared>, ExperimentError> {
    let items = load_items(cfg, ctx)?;
    if items.is_empty() {
        return Err(ExperimentError::Source("source yields no fields".into()));
    }
    if !cfg.per_group {
        return Ok(vec![label_pool(None, items, cfg)?]);
    }
    let mut groups: BTreeMap<String, Vec<Item>> = BTreeMap::new();
    for item in items {
        groups.entry(item.group().to_string()).or_default().push(item);
    }
    groups.into_iter().map(|(g, members)| label_pool(Some(g), members, cfg)).collect()
}

pub fn train_model(cfg: &ExperimentConfig, train: &LabeledDataset) -> Result<Model, ExperimentError> {
    Ok(match cfg.classifier {
        ClassifierKind::Forest => {
            let fc = crate::ml::ForestConfig { seed: cfg.seed, ..cfg.forest.clone() };
            Model::Forest(train_forest(train, &fc)?)
        }
        ClassifierKind::Logistic => Model::Logistic(train_logistic(train, &cfg.logistic)?),
    })
}

/// Evaluates `model` on every quadratic field of `range` carrying one of
/// `class_names`, featurizing in bounded chunks. Returns the report and the
/// per-class population of the range.
pub fn evaluate_range(
    model: &dyn Classifier,
    cfg: &ExperimentConfig,
    encoding: Encoding,
    range: &RangeSpec,
    class_names: &[String],
    ctx: &RunContext,
) -> Result<(EvalReport, Vec<usize>), ExperimentError> {
    let table = class_numbers(range.min_disc, range.max_disc, ctx.cache_dir.as_deref())?;
    let index: BTreeMap<&str, usize> = class_names.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let mut items = Vec::new();
    let mut labels = Vec::new();
    for (disc, class_number) in table {
        let item = Item::Quadratic { disc, class_number };
        if let Some(&c) = item.label(cfg.invariant).as_deref().and_then(|l| index.get(l)) {
            items.push(item);
            labels.push(c);
        }
    }
    let pool = Prepared { group: None, class_names: class_names.to_vec(), items, labels };
    let sizes = pool.class_sizes();
    let k = class_names.len();
    let mut report = EvalReport::from_confusion(class_names.to_vec(), vec![vec![0; k]; k]);
    let all: Vec<usize> = (0..pool.items.len()).collect();
    for chunk in all.chunks(CHUNK * 8) {
        let ds = pool.featurize(chunk, encoding, cfg)?;
        if ds.is_empty() {
            continue;
        }
        let predicted = model.predict(&ds);
        report.merge(&evaluate_predictions(ds.labels(), &predicted, class_names.to_vec())?);
    }
    if report.samples == 0 {
        return Err(ExperimentError::Source(format!("extrapolation range '{}' has no fields", range.label)));
    }
    Ok((report, sizes))
}

/// Rows plus the trained models, one per (group, encoding).
#[derive(Debug)]
pub struct ExperimentOutcome {
    pub rows: Vec<ResultRow>,
    pub models: Vec<(Option<String>, Encoding, ModelFile)>,
}

pub fn run_experiment(
    name: &str,
    cfg: &ExperimentConfig,
    ctx: &RunContext,
) -> Result<ExperimentOutcome, ExperimentError> {
    cfg.validate().map_err(ExperimentError::Config)?;
    let start = Instant::now();
    let pools = prepare(cfg, ctx)?;
    let mut rows = Vec::new();
    let mut models = Vec::new();
    for pool in &pools {
        ctx.note(start, format!("{name}: {} fields, classes {:?}", pool.items.len(), pool.class_sizes()));
        let (train_idx, val_idx) = split_indices(&pool.labels, pool.class_names.len(), cfg.train_fraction, cfg.seed)?;
        for &encoding in &cfg.encodings {
            let train = pool.featurize(&train_idx, encoding, cfg)?;
            let validation = pool.featurize(&val_idx, encoding, cfg)?;
            if train.is_empty() || validation.is_empty() {
                return Err(ExperimentError::Source(format!("{encoding}: every field was excluded")));
            }
            ctx.note(
                start,
                format!(
                    "{name}/{encoding}: featurized {} + {} rows, dim {}",
                    train.len(),
                    validation.len(),
                    train.dim()
                ),
            );
            let model = train_model(cfg, &train)?;
            ctx.note(start, format!("{name}/{encoding}: trained {}", cfg.classifier));
            let report = evaluate(&model, &validation)?;
            let sizes: Vec<usize> =
                train.class_counts().iter().zip(validation.class_counts()).map(|(a, b)| a + b).collect();
            rows.push(make_row(
                name,
                cfg,
                pool.group.clone(),
                "base",
                encoding,
                &report,
                sizes,
                train.len(),
                validation.len(),
            ));
            drop(train);
            drop(validation);
            for range in &cfg.extrapolation {
                let (report, sizes) = evaluate_range(&model, cfg, encoding, range, &pool.class_names, ctx)?;
                ctx.note(start, format!("{name}/{encoding}/{}: precision {:.4}", range.label, report.precision));
                let n = report.samples as usize;
                rows.push(make_row(name, cfg, pool.group.clone(), &range.label, encoding, &report, sizes, 0, n));
            }
            let mut file = ModelFile::new(model, pool.class_names.clone());
            file.features.insert("experiment".into(), name.into());
            file.features.insert("encoding".into(), encoding.to_string());
            file.features.insert("invariant".into(), format!("{:?}", cfg.invariant));
            if let Some(len) = cfg.feature_length(encoding) {
                file.features.insert("length".into(), len.to_string());
            }
            if encoding == Encoding::Poly && cfg.signed_log {
                file.features.insert("transform".into(), "signed_log".into());
            }
            models.push((pool.group.clone(), encoding, file));
        }
    }
    Ok(ExperimentOutcome { rows, models })
}

#[allow(clippy::too_many_arguments)]
fn make_row(
    name: &str,
    cfg: &ExperimentConfig,
    group: Option<String>,
    scope: &str,
    encoding: Encoding,
    report: &EvalReport,
    class_sizes: Vec<usize>,
    train_size: usize,
    validation_size: usize,
) -> ResultRow {
    let reference = cfg.references.iter().find(|r| r.matches(encoding, scope, group.as_deref()));
    ResultRow {
        experiment: name.to_string(),
        group,
        scope: scope.to_string(),
        encoding: encoding.to_string(),
        classifier: cfg.classifier.to_string(),
        class_names: report.class_names.clone(),
        class_sizes,
        train_size,
        validation_size,
        precision: report.precision,
        mcc: report.mcc,
        confusion: report.confusion.clone(),
        reference_precision: reference.and_then(|r| r.precision),
        reference_mcc: reference.and_then(|r| r.mcc),
        passed: reference.and_then(|r| r.check(report.precision, report.mcc)),
    }
}
