use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bcp_core::bcp::{bcp_train, BcpConfig};
use bcp_core::features::{rff_transform_dataset, RffSpec};
use bcp_core::grid::{run_bench, write_bench_reports, BenchGrid};
use bcp_core::io::{
    load_table, load_with_encoding, read_table_path, write_dataset_csv_path, write_json,
    write_rows_with_column, CategoricalColumns, CsvSchema, EncodingMap, LoadedCsv, ModelFile,
    RawTable,
};
use bcp_core::metrics::{evaluate, time_block};
use bcp_core::reduce::{extract_subset, Closeness, ReductionPolicy};
use bcp_core::synth::{DataSpec, GenKind};
use bcp_core::trainers::{
    model_decision, MlpConfig, Model, PerceptronConfig, SvmConfig, TrainerConfig,
};
use bcp_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "bcp",
    version,
    about = "Training-set reduction with the barycentric correction procedure"
)]
struct Cli {
    /// Seed for every random choice the command makes.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (for `bench`: output directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON settings for the command; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic labelled dataset.
    Gen(GenArgs),
    /// Map a dataset through random Fourier features.
    Rff(RffArgs),
    /// Fit a BCP hyperplane and save it as a model file.
    Bcp(InputArgs),
    /// Keep the rows closest to a BCP hyperplane.
    Reduce(ReduceArgs),
    /// Train a downstream classifier.
    Train(TrainArgs),
    /// Score a model on a labelled file.
    Eval(EvalArgs),
    /// Run a benchmark grid.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Linear,
    Poly,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    margin_gap: Option<f64>,
}

#[derive(Args)]
struct LoadArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "label")]
    label_column: String,
    /// Label value mapped to the positive class; every other value is negative.
    #[arg(long, default_value = "1")]
    positive_label: String,
    /// Comma-separated nominal columns; detected automatically when absent.
    #[arg(long, value_delimiter = ',')]
    categorical: Option<Vec<String>>,
    /// Scale numeric columns to mean 0, variance 1.
    #[arg(long)]
    standardize: bool,
    /// Comma-separated columns removed before encoding, e.g. `bcp_distance`.
    #[arg(long, value_delimiter = ',')]
    drop: Vec<String>,
}

#[derive(Args)]
struct InputArgs {
    #[command(flatten)]
    load: LoadArgs,
}

#[derive(Args)]
struct RffArgs {
    #[command(flatten)]
    load: LoadArgs,
    #[arg(long)]
    components: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Args)]
struct ReduceArgs {
    #[command(flatten)]
    load: LoadArgs,
    /// Hyperplane model from `bcp`; BCP is fitted on the input when absent.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, conflicts_with = "band_width")]
    keep_fraction: Option<f64>,
    #[arg(long)]
    band_width: Option<f64>,
    #[arg(long)]
    min_per_class: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Svm,
    Mlp,
    Perceptron,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    load: LoadArgs,
    #[arg(long, value_enum)]
    algo: Option<AlgoArg>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    load: LoadArgs,
    #[arg(long)]
    model: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory for bench.csv and bench.json.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) | Error::InvalidGamma(_) => Self::Usage(e.to_string()),
            other => Self::Data(other.to_string()),
        }
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Prefix errors from reading or writing `path` with the path.
fn at(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| match Failure::from(e) {
        Failure::Data(msg) => Failure::Data(format!("{}: {msg}", path.display())),
        usage => usage,
    }
}

fn read_config<T: serde::de::DeserializeOwned>(path: Option<&Path>) -> Outcome<Option<T>> {
    let Some(path) = path else { return Ok(None) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
}

fn required_out(cli: &Cli) -> Outcome<&Path> {
    cli.out
        .as_deref()
        .ok_or_else(|| usage("--out is required for this command"))
}

fn schema(load: &LoadArgs) -> CsvSchema {
    CsvSchema {
        label_column: load.label_column.clone(),
        positive_label: load.positive_label.clone(),
        categorical_columns: match &load.categorical {
            Some(cols) => CategoricalColumns::Explicit(cols.clone()),
            None => CategoricalColumns::Auto,
        },
        standardize: load.standardize,
    }
}

fn read_input(load: &LoadArgs) -> Outcome<RawTable> {
    let mut table = read_table_path(&load.input).map_err(at(&load.input))?;
    for name in &load.drop {
        let col = table.header.iter().position(|h| h == name).ok_or_else(|| {
            Failure::Data(format!(
                "{}: no column `{name}` to drop",
                load.input.display()
            ))
        })?;
        table.header.remove(col);
        for record in &mut table.records {
            if col < record.len() {
                record.remove(col);
            }
        }
    }
    Ok(table)
}

fn load(load: &LoadArgs) -> Outcome<LoadedCsv> {
    let table = read_input(load)?;
    let loaded = load_table(&table, &schema(load)).map_err(at(&load.input))?;
    report_rejections(&loaded);
    Ok(loaded)
}

fn report_rejections(loaded: &LoadedCsv) {
    let rejected = &loaded.summary.rejected;
    if !rejected.is_empty() {
        eprintln!(
            "rejected {} of {} rows (first: row {}, {})",
            rejected.len(),
            loaded.summary.rows_read,
            rejected[0].row,
            rejected[0].reason
        );
    }
}

fn print_json(value: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable")
    );
}

fn run_gen(cli: &Cli, args: &GenArgs) -> Outcome {
    let out = required_out(cli)?;
    let base: Option<DataSpec> = read_config(cli.config.as_deref())?;
    let mut spec = base.unwrap_or(DataSpec {
        kind: GenKind::Linear,
        n: 1000,
        p: 10,
        degree: 3,
        margin_gap: 0.0,
    });
    if let Some(kind) = args.kind {
        spec.kind = match kind {
            KindArg::Linear => GenKind::Linear,
            KindArg::Poly => GenKind::Poly,
        };
    }
    spec.n = args.n.unwrap_or(spec.n);
    spec.p = args.p.unwrap_or(spec.p);
    spec.degree = args.degree.unwrap_or(spec.degree);
    spec.margin_gap = args.margin_gap.unwrap_or(spec.margin_gap);
    let seed = cli.seed.unwrap_or(0);

    let result = spec.generate(seed)?;
    write_dataset_csv_path(&result.dataset, out).map_err(at(out))?;
    let teacher_path = teacher_path(out);
    let teacher = json!({
        "kind": match spec.kind { GenKind::Linear => "linear", GenKind::Poly => "poly" },
        "degree": (spec.kind == GenKind::Poly).then_some(spec.degree),
        "lifted_dim": result.lifted_dim,
        "seed": result.teacher.seed,
        "beta": result.teacher.beta,
    });
    write_json(&teacher, &teacher_path)?;
    let (pos, neg) = result.dataset.class_counts();
    eprintln!(
        "wrote {} rows ({pos} positive, {neg} negative) to {} and teacher to {}",
        result.dataset.n_samples(),
        out.display(),
        teacher_path.display()
    );
    Ok(())
}

/// `data.csv` -> `data.teacher.json`.
fn teacher_path(out: &Path) -> PathBuf {
    let stem = match out.extension() {
        Some(ext) if ext == "csv" => out.with_extension(""),
        _ => out.to_path_buf(),
    };
    let mut name = stem.into_os_string();
    name.push(".teacher.json");
    PathBuf::from(name)
}

fn run_rff(cli: &Cli, args: &RffArgs) -> Outcome {
    let out = required_out(cli)?;
    let base: Option<RffSpec> = read_config(cli.config.as_deref())?;
    let components = args
        .components
        .or(base.as_ref().map(|b| b.components))
        .ok_or_else(|| usage("--components is required (flag or config)"))?;
    let spec = RffSpec {
        components,
        gamma: args.gamma.or(base.as_ref().and_then(|b| b.gamma)),
        seed: cli.seed.or(base.as_ref().map(|b| b.seed)).unwrap_or(0),
    };
    let data = load(&args.load)?.dataset;
    let params = spec.fit(data.n_features())?;
    let lifted = rff_transform_dataset(&params, &data)?;
    write_dataset_csv_path(&lifted, out)?;
    eprintln!(
        "mapped {} rows from {} to {} features (gamma {})",
        lifted.n_samples(),
        data.n_features(),
        params.n_components,
        params.gamma
    );
    Ok(())
}

fn run_bcp(cli: &Cli, args: &InputArgs) -> Outcome {
    let out = required_out(cli)?;
    let cfg: BcpConfig = read_config(cli.config.as_deref())?.unwrap_or_default();
    let loaded = load(&args.load)?;
    let result = bcp_train(&loaded.dataset, &cfg)?;
    let file = ModelFile::new(Model::Linear(result.best_hyperplane.clone()))
        .with_meta("trainer", "bcp")
        .with_meta("best_error_count", result.best_error_count)
        .with_meta("best_iteration", result.best_iteration)
        .with_meta("iterations_run", result.iterations_run)
        .with_meta("converged", result.converged)
        .with_meta(
            "encoding",
            serde_json::to_value(&loaded.encoding).expect("serializable"),
        );
    file.save(out)?;
    print_json(&json!({
        "n": loaded.dataset.n_samples(),
        "p": loaded.dataset.n_features(),
        "best_error_count": result.best_error_count,
        "best_iteration": result.best_iteration,
        "iterations_run": result.iterations_run,
        "converged": result.converged,
    }));
    Ok(())
}

fn run_reduce(cli: &Cli, args: &ReduceArgs) -> Outcome {
    let out = required_out(cli)?;
    let mut policy: ReductionPolicy = read_config(cli.config.as_deref())?.unwrap_or_default();
    if let Some(f) = args.keep_fraction {
        policy.rule = Closeness::KeepFraction(f);
    }
    if let Some(b) = args.band_width {
        policy.rule = Closeness::BandWidth(b);
    }
    if let Some(m) = args.min_per_class {
        policy.min_per_class = m;
    }
    policy.validate()?;

    let table = read_input(&args.load)?;
    let loaded = load_table(&table, &schema(&args.load)).map_err(at(&args.load.input))?;
    report_rejections(&loaded);
    let hyperplane = match &args.model {
        Some(path) => match ModelFile::load(path).map_err(at(path))?.model {
            Model::Linear(h) => h,
            Model::Mlp(_) => return Err(usage("--model must be a hyperplane model")),
        },
        None => bcp_train(&loaded.dataset, &BcpConfig::default())?.best_hyperplane,
    };
    let selection = extract_subset(&loaded.dataset, &hyperplane, &policy)?;
    let rows: Vec<usize> = selection
        .indices
        .iter()
        .map(|&i| loaded.source_rows[i])
        .collect();
    let file = std::fs::File::create(out).map_err(|e| at(out)(Error::from(e)))?;
    write_rows_with_column(
        &table,
        &rows,
        "bcp_distance",
        &selection.distances,
        std::io::BufWriter::new(file),
    )?;
    eprintln!(
        "kept {} of {} rows ({} positive, {} negative)",
        selection.indices.len(),
        loaded.dataset.n_samples(),
        selection.n_positive,
        selection.n_negative
    );
    Ok(())
}

fn trainer_config(cli: &Cli, algo: Option<AlgoArg>) -> Outcome<TrainerConfig> {
    let raw: Option<Value> = read_config(cli.config.as_deref())?;
    let bad = |e: serde_json::Error| usage(format!("invalid trainer config: {e}"));
    let cfg = match (algo, raw) {
        (None, Some(v)) if v.get("algo").is_some() => serde_json::from_value(v).map_err(bad)?,
        (algo, raw) => {
            let raw = raw.unwrap_or_else(|| json!({}));
            match algo.unwrap_or(AlgoArg::Svm) {
                AlgoArg::Svm => {
                    TrainerConfig::Svm(serde_json::from_value::<SvmConfig>(raw).map_err(bad)?)
                }
                AlgoArg::Mlp => {
                    TrainerConfig::Mlp(serde_json::from_value::<MlpConfig>(raw).map_err(bad)?)
                }
                AlgoArg::Perceptron => TrainerConfig::Perceptron(
                    serde_json::from_value::<PerceptronConfig>(raw).map_err(bad)?,
                ),
            }
        }
    };
    let cfg = match cli.seed {
        Some(seed) => cfg.with_seed(seed),
        None => cfg,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn run_train(cli: &Cli, args: &TrainArgs) -> Outcome {
    let out = required_out(cli)?;
    let cfg = trainer_config(cli, args.algo)?;
    let loaded = load(&args.load)?;
    let (model, seconds) = time_block(|| cfg.train(&loaded.dataset));
    let model = model?;
    let scores = model_decision(&model, &loaded.dataset)?;
    let fit = evaluate(loaded.dataset.labels(), &scores, model.threshold(), seconds)?;
    ModelFile::new(model)
        .with_meta("trainer", cfg.name())
        .with_meta("config", serde_json::to_value(&cfg).expect("serializable"))
        .with_meta(
            "encoding",
            serde_json::to_value(&loaded.encoding).expect("serializable"),
        )
        .save(out)?;
    print_json(&json!({
        "trainer": cfg.name(),
        "n": loaded.dataset.n_samples(),
        "p": loaded.dataset.n_features(),
        "training_accuracy": fit.accuracy,
        "train_seconds": seconds,
    }));
    Ok(())
}

fn run_eval(cli: &Cli, args: &EvalArgs) -> Outcome {
    let file = ModelFile::load(&args.model).map_err(at(&args.model))?;
    let schema_override: Option<CsvSchema> = read_config(cli.config.as_deref())?;
    let table = read_input(&args.load)?;
    let loaded = match (file.meta.get("encoding"), schema_override) {
        (_, Some(schema)) => load_table(&table, &schema)?,
        (Some(enc), None) => {
            let map: EncodingMap = serde_json::from_value(enc.clone()).map_err(|e| {
                Failure::Data(format!("{}: model encoding: {e}", args.model.display()))
            })?;
            load_with_encoding(&table, &map)?
        }
        (None, None) => load_table(&table, &schema(&args.load))?,
    };
    report_rejections(&loaded);
    let (scores, seconds) = time_block(|| model_decision(&file.model, &loaded.dataset));
    let report = evaluate(
        loaded.dataset.labels(),
        &scores?,
        file.model.threshold(),
        seconds,
    )?;
    let value = serde_json::to_value(&report).expect("serializable");
    if let Some(out) = &cli.out {
        write_json(&value, out)?;
    }
    print_json(&value);
    Ok(())
}

fn run_bench_cmd(cli: &Cli, args: &BenchArgs) -> Outcome {
    let mut grid: BenchGrid = read_config(cli.config.as_deref())?
        .ok_or_else(|| usage("bench needs --config grid.json"))?;
    grid.validate()?;
    if let Some(seed) = cli.seed {
        for cell in &mut grid.cells {
            cell.base_seed = seed;
        }
    }
    let dir = args
        .out_dir
        .as_deref()
        .or(cli.out.as_deref())
        .ok_or_else(|| usage("bench needs --out-dir"))?;
    let report = run_bench(&grid)?;
    write_bench_reports(&report, dir)?;
    let failed = report.rows.iter().filter(|r| r.error.is_some()).count();
    eprintln!(
        "{} rows ({failed} failed) written to {}",
        report.rows.len(),
        dir.display()
    );
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Gen(a) => run_gen(cli, a),
        Command::Rff(a) => run_rff(cli, a),
        Command::Bcp(a) => run_bcp(cli, a),
        Command::Reduce(a) => run_reduce(cli, a),
        Command::Train(a) => run_train(cli, a),
        Command::Eval(a) => run_eval(cli, a),
        Command::Bench(a) => run_bench_cmd(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
