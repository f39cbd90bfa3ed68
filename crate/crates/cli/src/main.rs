//! `zetalab`: generate, ingest and encode number fields, compute class-number
//! censuses, and run the classification experiments.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zetalab::experiments::{
    census_real_quadratic_range, class_numbers, emit_report, evaluate_range, parse_json_report, prepare, read_manifest,
    run_dir_path, run_experiment, sha256_hex, timestamp, train_model, write_run, ConfigFile, ExperimentConfig,
    ExperimentError, RangeSpec, ReportFormat, ResultRow, RunContext, RunManifest, Source, DEFAULT_CONFIG,
};
use zetalab::fields::{encode_batch, Encoding, NumberField};
use zetalab::ingest::{default_cache_dir, read_snapshot, write_snapshot, IngestError};
use zetalab::ml::{evaluate, split_indices, MlError, ModelFile};
use zetalab::quadratic::QuadraticField;

#[derive(Parser, Debug)]
#[command(name = "zetalab", version, about = "Number-field datasets and classifiers")]
struct Cli {
    /// Seed for every random choice (overrides the seed in configs).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Cache directory (default: $ZETALAB_CACHE, else ./.zetalab-cache).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Progress messages on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List quadratic fields in a discriminant range, or write them as a snapshot.
    Generate(GenerateArgs),
    /// Fetch fields from the LMFDB (cached), or validate a local snapshot.
    Ingest(IngestArgs),
    /// Encode fields as POLY, ZETA or SPLIT vectors (CSV).
    Featurize(FeaturizeArgs),
    /// Count real quadratic fields by class number.
    Census(CensusArgs),
    /// Train one experiment's classifier and save the model.
    Train(TrainArgs),
    /// Evaluate a saved model on its experiment's validation split or a range.
    Evaluate(EvaluateArgs),
    /// Run experiments and write a run directory.
    Experiment(ExperimentArgs),
    /// Render the results of a run directory.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// Generate quadratic fields (the only generator).
    #[arg(long)]
    quadratic: bool,
    /// Inclusive discriminant range LO:HI (negative for imaginary fields).
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    range: (i64, i64),
    /// Also print class numbers.
    #[arg(long)]
    class_numbers: bool,
    /// Write a snapshot CSV instead of listing discriminants.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// Validate and normalize this snapshot instead of fetching.
    #[arg(long, conflicts_with_all = ["degree", "galois"])]
    input: Option<PathBuf>,
    /// Field degree to fetch.
    #[arg(long, required_unless_present = "input")]
    degree: Option<u32>,
    /// Galois group (C8, D4, C2xC2, S3, ... or a transitive label such as 8T1).
    #[arg(long, required_unless_present = "input")]
    galois: Option<String>,
    /// Signature R1,R2.
    #[arg(long, value_parser = parse_pair)]
    signature: Option<(u32, u32)>,
    /// Smallest absolute discriminant.
    #[arg(long)]
    min_disc: Option<u64>,
    /// Largest absolute discriminant.
    #[arg(long)]
    max_disc: Option<u64>,
    /// Maximum number of records.
    #[arg(long, default_value_t = 100_000)]
    limit: usize,
    /// Snapshot CSV to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FeaturizeArgs {
    /// Snapshot CSV to encode.
    #[arg(long, required_unless_present = "range")]
    input: Option<PathBuf>,
    /// Encode every quadratic field with discriminant in LO:HI instead.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true, conflicts_with = "input")]
    range: Option<(i64, i64)>,
    /// poly, zeta or split.
    #[arg(long)]
    encoding: Encoding,
    /// Vector length for zeta (default 1000) and split (default 500).
    #[arg(long)]
    length: Option<usize>,
    /// Output CSV (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CensusArgs {
    /// Count fundamental discriminants in (0, N].
    #[arg(long, required_unless_present = "range")]
    max_disc: Option<i64>,
    /// Count fundamental discriminants in LO:HI instead.
    #[arg(long, value_parser = parse_range, conflicts_with = "max_disc")]
    range: Option<(i64, i64)>,
    /// Comma-separated class numbers to count (default: all).
    #[arg(long, value_delimiter = ',')]
    class_numbers: Vec<u64>,
    /// text or json.
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args, Debug, Clone)]
struct ConfigArgs {
    /// Experiment config (default: the bundled registry).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory that snapshot paths resolve against (default: the config's directory).
    #[arg(long)]
    data_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Experiment name.
    #[arg(long)]
    name: String,
    /// Encoding to train on (default: the experiment's first).
    #[arg(long)]
    encoding: Option<Encoding>,
    /// Galois group, for per-group experiments.
    #[arg(long)]
    group: Option<String>,
    /// Model file to write (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Experiment name.
    #[arg(long)]
    name: String,
    /// Model file written by `train`.
    #[arg(long)]
    model: PathBuf,
    /// Galois group, for per-group experiments.
    #[arg(long)]
    group: Option<String>,
    /// Evaluate on every quadratic field in LO:HI instead of the validation split.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    range: Option<(i64, i64)>,
    /// text, csv or json.
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Comma-separated experiment names.
    #[arg(long, value_delimiter = ',', required_unless_present = "all")]
    name: Vec<String>,
    /// Run every experiment whose data is available.
    #[arg(long, conflicts_with = "name")]
    all: bool,
    /// Parent of the run directory.
    #[arg(long, default_value = "runs")]
    out_dir: PathBuf,
    /// Also save trained models in the run directory.
    #[arg(long)]
    save_models: bool,
    /// text, csv or json (stdout).
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Run directory written by `experiment`.
    #[arg(long)]
    run: PathBuf,
    /// text, csv or json.
    #[arg(long, default_value = "text")]
    format: String,
}

/// A failure with its exit code: 1 usage, 2 data, 3 computation.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 1, kind: "usage", message: message.into() }
    }

    fn data(message: impl Into<String>) -> Self {
        Failure { code: 2, kind: "data", message: message.into() }
    }

    fn computation(message: impl Into<String>) -> Self {
        Failure { code: 3, kind: "computation", message: message.into() }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Config(_) | ExperimentError::UnknownExperiment(_) => Failure::usage(e.to_string()),
            ExperimentError::Source(_)
            | ExperimentError::ZeroSupport { .. }
            | ExperimentError::Cache(_)
            | ExperimentError::Ingest(_)
            | ExperimentError::Io(_) => Failure::data(e.to_string()),
            ExperimentError::Field(_) | ExperimentError::Quadratic(_) => Failure::computation(e.to_string()),
            ExperimentError::Ml(inner) => inner.into(),
        }
    }
}

impl From<MlError> for Failure {
    fn from(e: MlError) -> Self {
        match e {
            MlError::Io(_) | MlError::Json(_) | MlError::Version(_) | MlError::DimensionMismatch { .. } => {
                Failure::data(e.to_string())
            }
            MlError::InvalidConfig(_) | MlError::DegenerateSplit { .. } => Failure::usage(e.to_string()),
            _ => Failure::computation(e.to_string()),
        }
    }
}

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        Failure::data(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::data(e.to_string())
    }
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got '{s}'"))?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("bad lower bound '{lo}': {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("bad upper bound '{hi}': {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

fn parse_pair(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected R1,R2, got '{s}'"))?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

fn parse_format(s: &str) -> Result<ReportFormat, Failure> {
    s.parse().map_err(|e: ExperimentError| Failure::usage(e.to_string()))
}

struct Env {
    seed: Option<u64>,
    jobs: usize,
    cache_dir: PathBuf,
    verbose: bool,
}

/// The parsed config, its raw text, and the directory snapshots resolve against.
fn load_config(args: &ConfigArgs) -> Result<(ConfigFile, String, PathBuf, Option<String>), Failure> {
    let (text, dir, path) = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
            let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
            (text, dir, Some(path.display().to_string()))
        }
        None => (DEFAULT_CONFIG.to_string(), PathBuf::from("."), None),
    };
    let file = ConfigFile::parse(&text)?;
    let dir = args.data_dir.clone().unwrap_or(dir);
    Ok((file, text, dir, path))
}

fn experiment_config(file: &ConfigFile, name: &str, env: &Env) -> Result<ExperimentConfig, Failure> {
    let mut cfg = file.get(name)?.clone();
    if let Some(seed) = env.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn context(env: &Env, base_dir: PathBuf) -> RunContext {
    RunContext { cache_dir: Some(env.cache_dir.clone()), base_dir, verbose: env.verbose }
}

fn snapshot_available(cfg: &ExperimentConfig, base: &Path) -> bool {
    match &cfg.source {
        Source::Snapshot { path, .. } => base.join(path).exists(),
        Source::Quadratic { .. } => true,
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::data(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn quadratic_fields(lo: i64, hi: i64, env: &Env) -> Result<Vec<NumberField>, Failure> {
    let table = class_numbers(lo, hi, Some(&env.cache_dir))?;
    Ok(table
        .into_iter()
        .map(|(d, h)| {
            let q = QuadraticField::from_discriminant(d).expect("fundamental by construction");
            NumberField::quadratic_with(&q, Some(h))
        })
        .collect())
}

fn cmd_generate(args: GenerateArgs, env: &Env) -> Result<(), Failure> {
    if !args.quadratic {
        return Err(Failure::usage("generate needs --quadratic"));
    }
    let (lo, hi) = args.range;
    if let Some(out) = &args.out {
        let fields = quadratic_fields(lo, hi, env)?;
        write_snapshot(out, &fields)?;
        eprintln!("wrote {} fields to {}", fields.len(), out.display());
        return Ok(());
    }
    let mut text = String::new();
    if args.class_numbers {
        for (d, h) in class_numbers(lo, hi, Some(&env.cache_dir))? {
            text.push_str(&format!("{d},{h}\n"));
        }
    } else {
        for d in zetalab::quadratic::fundamental_discriminants(lo, hi) {
            text.push_str(&format!("{d}\n"));
        }
    }
    write_output(None, &text)
}

fn cmd_ingest(args: IngestArgs, env: &Env) -> Result<(), Failure> {
    let fields = match &args.input {
        Some(input) => read_snapshot(input)?,
        None => {
            let mut query = zetalab::ingest::LmfdbQuery::new(
                args.degree.expect("required by clap"),
                args.galois.clone().expect("required by clap"),
                args.limit,
            );
            query.signature = args.signature;
            query.min_abs_disc = args.min_disc;
            query.max_abs_disc = args.max_disc;
            zetalab::ingest::fetch_lmfdb(&query, &env.cache_dir, &zetalab::ingest::UreqTransport)?
        }
    };
    write_snapshot(&args.out, &fields)?;
    eprintln!("wrote {} fields to {}", fields.len(), args.out.display());
    Ok(())
}

fn cmd_featurize(args: FeaturizeArgs, env: &Env) -> Result<(), Failure> {
    let fields = match (&args.input, args.range) {
        (Some(path), _) => read_snapshot(path)?,
        (None, Some((lo, hi))) => quadratic_fields(lo, hi, env)?,
        (None, None) => return Err(Failure::usage("featurize needs --input or --range")),
    };
    let vectors = encode_batch(&fields, args.encoding, args.length).map_err(|e| Failure::computation(e.to_string()))?;
    let width = vectors.iter().map(|v| v.values.len()).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["label".to_string(), "uncertain_primes".to_string()];
    header.extend((1..=width).map(|i| format!("v{i}")));
    let csv_err = |e: csv::Error| Failure::data(e.to_string());
    w.write_record(&header).map_err(csv_err)?;
    for (field, v) in fields.iter().zip(&vectors) {
        let mut record =
            vec![field.label.clone(), v.uncertain_primes.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")];
        record.extend(v.values.iter().map(i64::to_string));
        record.resize(width + 2, String::new());
        w.write_record(&record).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::data(e.to_string()))?;
    write_output(args.out.as_deref(), &String::from_utf8_lossy(&bytes))
}

fn cmd_census(args: CensusArgs, env: &Env) -> Result<(), Failure> {
    let format = parse_format(&args.format)?;
    let (lo, hi) = match (args.max_disc, args.range) {
        (Some(max), _) => (1, max),
        (None, Some(r)) => r,
        (None, None) => return Err(Failure::usage("census needs --max-disc or --range")),
    };
    if hi < 5 {
        return Err(Failure::usage(format!("range {lo}:{hi} contains no real quadratic discriminants")));
    }
    let census = census_real_quadratic_range(lo, hi, &args.class_numbers, Some(&env.cache_dir))?;
    let text = match format {
        ReportFormat::Json => serde_json::to_string_pretty(&census).expect("serializable") + "\n",
        ReportFormat::Csv => {
            let mut s = String::from("class_number,count\n");
            for (h, n) in &census.counts {
                s.push_str(&format!("{h},{n}\n"));
            }
            s
        }
        ReportFormat::Text => {
            let mut s = format!("real quadratic fields with {}<=D<={}: {}\n", census.lo, census.hi, census.fields);
            for (h, n) in &census.counts {
                s.push_str(&format!("h={h}: {n}\n"));
            }
            s
        }
    };
    write_output(None, &text)
}

/// The prepared pool for `group` (or the only one) of an experiment.
fn pick_pool(
    pools: Vec<zetalab::experiments::Prepared>,
    group: Option<&str>,
) -> Result<zetalab::experiments::Prepared, Failure> {
    if pools.len() == 1 && group.is_none() {
        return Ok(pools.into_iter().next().unwrap());
    }
    let Some(group) = group else {
        let groups: Vec<String> = pools.iter().filter_map(|p| p.group.clone()).collect();
        return Err(Failure::usage(format!("experiment runs per group; pass --group (one of {})", groups.join(", "))));
    };
    pools
        .into_iter()
        .find(|p| p.group.as_deref() == Some(group))
        .ok_or_else(|| Failure::usage(format!("no group '{group}'")))
}

fn cmd_train(args: TrainArgs, env: &Env) -> Result<(), Failure> {
    let (file, _, dir, _) = load_config(&args.config)?;
    let cfg = experiment_config(&file, &args.name, env)?;
    let encoding = args.encoding.unwrap_or(cfg.encodings[0]);
    let ctx = context(env, dir);
    let pool = pick_pool(prepare(&cfg, &ctx)?, args.group.as_deref())?;
    let (train_idx, _) = split_indices(&pool.labels, pool.class_names.len(), cfg.train_fraction, cfg.seed)?;
    let train = pool.featurize(&train_idx, encoding, &cfg)?;
    let model = train_model(&cfg, &train)?;
    let mut saved = ModelFile::new(model, pool.class_names.clone());
    saved.features.insert("experiment".into(), args.name.clone());
    saved.features.insert("encoding".into(), encoding.to_string());
    saved.features.insert("seed".into(), cfg.seed.to_string());
    if let Some(g) = &pool.group {
        saved.features.insert("group".into(), g.clone());
    }
    saved.save(&args.out)?;
    eprintln!("trained on {} fields; model written to {}", train.len(), args.out.display());
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs, env: &Env) -> Result<(), Failure> {
    let format = parse_format(&args.format)?;
    let (file, _, dir, _) = load_config(&args.config)?;
    let cfg = experiment_config(&file, &args.name, env)?;
    let saved = ModelFile::load(&args.model)?;
    let encoding: Encoding = saved.features.get("encoding").and_then(|e| e.parse().ok()).unwrap_or(cfg.encodings[0]);
    let ctx = context(env, dir);
    let (report, scope, sizes) = match args.range {
        Some((lo, hi)) => {
            let range = RangeSpec { label: format!("{lo}:{hi}"), min_disc: lo, max_disc: hi };
            let (report, sizes) = evaluate_range(&saved.model, &cfg, encoding, &range, &saved.class_names, &ctx)?;
            (report, range.label, sizes)
        }
        None => {
            let pool = pick_pool(prepare(&cfg, &ctx)?, args.group.as_deref())?;
            if pool.class_names != saved.class_names {
                return Err(Failure::data("model classes do not match the experiment"));
            }
            let (_, val_idx) = split_indices(&pool.labels, pool.class_names.len(), cfg.train_fraction, cfg.seed)?;
            let validation = pool.featurize(&val_idx, encoding, &cfg)?;
            let report = evaluate(&saved.model, &validation)?;
            let sizes = validation.class_counts();
            (report, "validation".to_string(), sizes)
        }
    };
    let row = ResultRow {
        experiment: args.name.clone(),
        group: args.group.clone(),
        scope,
        encoding: encoding.to_string(),
        classifier: match saved.model {
            zetalab::ml::Model::Forest(_) => "forest".into(),
            zetalab::ml::Model::Logistic(_) => "logistic".into(),
        },
        class_names: report.class_names.clone(),
        class_sizes: sizes,
        train_size: 0,
        validation_size: report.samples as usize,
        precision: report.precision,
        mcc: report.mcc,
        confusion: report.confusion.clone(),
        reference_precision: None,
        reference_mcc: None,
        passed: None,
    };
    write_output(None, &emit_report(&[row], format))
}

fn cmd_experiment(args: ExperimentArgs, env: &Env) -> Result<(), Failure> {
    let format = parse_format(&args.format)?;
    let (file, text, dir, config_path) = load_config(&args.config)?;
    let names: Vec<String> = if args.all { file.experiments.keys().cloned().collect() } else { args.name.clone() };
    let ctx = context(env, dir.clone());
    let started_at = timestamp();
    let mut rows = Vec::new();
    let mut models = Vec::new();
    let mut ran = Vec::new();
    for name in &names {
        let cfg = experiment_config(&file, name, env)?;
        if args.all && !snapshot_available(&cfg, &dir) {
            eprintln!("skipping {name}: snapshot not found");
            continue;
        }
        let outcome = run_experiment(name, &cfg, &ctx)?;
        rows.extend(outcome.rows);
        models.extend(outcome.models.into_iter().map(|(g, e, m)| (name.clone(), g, e, m)));
        ran.push(name.clone());
    }
    let hash = sha256_hex(text.as_bytes());
    let seed = env.seed.unwrap_or_else(|| ran.first().and_then(|n| file.experiments.get(n)).map_or(0, |c| c.seed));
    let run_name = if args.all { "all".to_string() } else { names.join("+") };
    let run_dir = run_dir_path(&args.out_dir, &run_name, &hash, seed);
    let mut manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        experiments: ran,
        config_path,
        config_sha256: hash,
        seed,
        jobs: env.jobs,
        started_at,
        finished_at: timestamp(),
        outputs: Vec::new(),
    };
    write_run(&run_dir, &rows, &mut manifest)?;
    if args.save_models {
        for (name, group, encoding, model) in &models {
            let file = match group {
                Some(g) => format!("model-{name}-{g}-{encoding}.json"),
                None => format!("model-{name}-{encoding}.json"),
            };
            model.save(&run_dir.join(&file))?;
            manifest.outputs.push(file);
        }
        write_run(&run_dir, &rows, &mut manifest)?;
    }
    eprintln!("run directory: {}", run_dir.display());
    write_output(None, &emit_report(&rows, format))
}

fn cmd_report(args: ReportArgs) -> Result<(), Failure> {
    let format = parse_format(&args.format)?;
    read_manifest(&args.run)?;
    let path = args.run.join("results.json");
    let text = std::fs::read_to_string(&path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    let rows = parse_json_report(&text).map_err(|e| Failure::data(e.to_string()))?;
    write_output(None, &emit_report(&rows, format))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let jobs = match cli.jobs {
        Some(0) => return Err(Failure::usage("--jobs must be at least 1")),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
        .map_err(|e| Failure::computation(e.to_string()))?;
    let env =
        Env { seed: cli.seed, jobs, cache_dir: cli.cache_dir.unwrap_or_else(default_cache_dir), verbose: cli.verbose };
    match cli.command {
        Command::Generate(a) => cmd_generate(a, &env),
        Command::Ingest(a) => cmd_ingest(a, &env),
        Command::Featurize(a) => cmd_featurize(a, &env),
        Command::Census(a) => cmd_census(a, &env),
        Command::Train(a) => cmd_train(a, &env),
        Command::Evaluate(a) => cmd_evaluate(a, &env),
        Command::Experiment(a) => cmd_experiment(a, &env),
        Command::Report(a) => cmd_report(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let first = e.to_string();
            let line = first.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("error: usage: {line}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}: {}", f.kind, f.message.replace('\n', " "));
            ExitCode::from(f.code)
        }
    }
}
