//! `modetrace` subcommands. Every command is a pure function of its input
//! files and flags; randomness comes only from `--seed`.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use modetrace_core::eval::{evaluate, holdout};
use modetrace_core::features::Avgspeed2Denominator;
use modetrace_core::forest::{rows_from_features, Row};
use modetrace_core::preprocess::{preprocess_dataset, PreprocessReport};
use modetrace_core::resample::{subsample_dataset, DEFAULT_SWEEP};
use modetrace_core::stats::{ks_sweep, velocity_distribution};
use modetrace_core::{Dataset, EvalReport, FeatureConfig, FeatureVector, ForestModel, ForestParams, KFoldOptions, Mode, SynthSpec};

use crate::formats::{self, stats as stat_formats};
use crate::parallel;

#[derive(Debug, Parser)]
#[command(name = "modetrace", version, about = "GPS travel mode detection toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic trip dataset
    Synth(SynthArgs),
    /// Drop records whose reported error exceeds the boxplot bound
    Preprocess(PreprocessArgs),
    /// Subsample every trip at a fixed interval
    Resample(ResampleArgs),
    /// Compute per-trip movement features
    Features(FeaturesArgs),
    /// KS statistic between two modes' velocity distributions per interval
    Ks(KsArgs),
    /// Train a random forest on a feature file
    Train(TrainArgs),
    /// Score a model, a holdout split or k-fold cross-validation
    Evaluate(EvaluateArgs),
    /// Predict modes for a feature file
    Predict(PredictArgs),
    /// synth/preprocess/features/train/evaluate in one go
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated modes to generate (default: all four)
    #[arg(long, value_delimiter = ',')]
    pub modes: Option<Vec<Mode>>,
    #[arg(long)]
    pub walk: Option<usize>,
    #[arg(long)]
    pub bike: Option<usize>,
    #[arg(long)]
    pub bus: Option<usize>,
    #[arg(long)]
    pub railway: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Fixed error bound in meters instead of Q3 + 1.5 IQR
    #[arg(long)]
    pub bound: Option<f64>,
    /// Write box statistics and removal counts as JSON here (default: stdout)
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ResampleArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Seconds
    #[arg(long)]
    pub interval: i64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DenominatorArg {
    Points,
    Velocities,
}

#[derive(Debug, Args)]
pub struct FeatureFlags {
    /// Subsample at this many seconds before extracting
    #[arg(long)]
    pub interval: Option<i64>,
    /// Keep only these modes
    #[arg(long, value_delimiter = ',')]
    pub modes: Option<Vec<Mode>>,
    #[arg(long = "avgspeed2-denominator", value_enum, default_value = "points")]
    pub denominator: DenominatorArg,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub flags: FeatureFlags,
}

#[derive(Debug, Args)]
pub struct KsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long = "mode-a", default_value = "walk")]
    pub mode_a: Mode,
    #[arg(long = "mode-b", default_value = "bike")]
    pub mode_b: Mode,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SWEEP)]
    pub intervals: Vec<i64>,
    /// Also write `hist_<mode>_<interval>.csv` files into this directory
    #[arg(long = "histogram-dir")]
    pub histogram_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ForestFlags {
    #[arg(long = "n-trees", default_value_t = 100)]
    pub n_trees: usize,
    #[arg(long = "max-features", default_value_t = 4)]
    pub max_features: usize,
    #[arg(long = "min-leaf", default_value_t = 1)]
    pub min_leaf: usize,
    #[arg(long = "max-depth")]
    pub max_depth: Option<usize>,
    #[arg(long = "no-bootstrap")]
    pub no_bootstrap: bool,
    /// Worker threads (default: one per core); results do not depend on it
    #[arg(long)]
    pub threads: Option<usize>,
}

impl ForestFlags {
    pub fn params(&self) -> ForestParams {
        ForestParams {
            n_trees: self.n_trees,
            max_features: self.max_features,
            min_leaf: self.min_leaf,
            max_depth: self.max_depth,
            bootstrap: !self.no_bootstrap,
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub forest: ForestFlags,
}

#[derive(Debug, Args)]
pub struct EvalFlags {
    /// k-fold cross-validation instead of a holdout split
    #[arg(long)]
    pub kfold: Option<usize>,
    #[arg(long = "train-fraction", default_value_t = 0.8)]
    pub train_fraction: f64,
    #[arg(long)]
    pub stratified: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Score this trained model on all input rows
    #[arg(long, conflicts_with = "kfold")]
    pub model: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub eval: EvalFlags,
    #[command(flatten)]
    pub forest: ForestFlags,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long = "out-dir")]
    pub out_dir: PathBuf,
    /// Start from this trip CSV instead of generating one
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub bound: Option<f64>,
    #[command(flatten)]
    pub features: FeatureFlags,
    #[command(flatten)]
    pub eval: EvalFlags,
    #[command(flatten)]
    pub forest: ForestFlags,
}

/// Parses `args` and runs, returning the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Synth(a) => synth(&a),
        Command::Preprocess(a) => preprocess(&a),
        Command::Resample(a) => resample(&a),
        Command::Features(a) => features(&a),
        Command::Ks(a) => ks(&a),
        Command::Train(a) => with_threads(a.forest.threads, || train(&a)),
        Command::Evaluate(a) => with_threads(a.forest.threads, || evaluate_cmd(&a)),
        Command::Predict(a) => predict(&a),
        Command::Pipeline(a) => with_threads(a.forest.threads, || pipeline(&a)),
    }
}

fn with_threads(threads: Option<usize>, f: impl FnOnce() -> Result<()> + Send) -> Result<()> {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f),
        None => f(),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn load_trips(path: &Path) -> Result<Dataset> {
    formats::parse_trips(&read(path)?, &path.display().to_string()).with_context(|| format!("parsing {}", path.display()))
}

pub fn load_features(path: &Path) -> Result<Vec<FeatureVector>> {
    formats::parse_features(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

pub fn synth_spec(seed: u64, modes: Option<&[Mode]>, counts: [Option<usize>; 4]) -> SynthSpec {
    let mut spec = SynthSpec::with_seed(seed);
    if let Some(modes) = modes {
        spec = spec.only_modes(modes);
    }
    for (mode, count) in [Mode::Walk, Mode::Bike, Mode::Bus, Mode::Railway].into_iter().zip(counts) {
        if let Some(c) = count {
            spec.set_count(mode, c);
        }
    }
    spec
}

fn synth(a: &SynthArgs) -> Result<()> {
    let spec = synth_spec(a.seed, a.modes.as_deref(), [a.walk, a.bike, a.bus, a.railway]);
    let ds = parallel::generate_dataset(&spec)?;
    write(&a.out, &formats::write_trips(&ds)?)?;
    eprintln!("synth: seed {}, {} trips, {} records", a.seed, ds.trips().len(), ds.record_count());
    Ok(())
}

fn report_json(report: &PreprocessReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)? + "\n")
}

fn preprocess(a: &PreprocessArgs) -> Result<()> {
    let ds = load_trips(&a.input)?;
    let (clean, report) = preprocess_dataset(&ds, a.bound)?;
    write(&a.out, &formats::write_trips(&clean)?)?;
    let json = report_json(&report)?;
    match &a.stats {
        Some(p) => write(p, &json)?,
        None => print!("{json}"),
    }
    eprintln!(
        "preprocess: bound {:.3} m, removed {} of {} records, dropped {} trips",
        report.bound,
        report.records_removed,
        report.records_in,
        report.trips_dropped.len()
    );
    Ok(())
}

fn resample(a: &ResampleArgs) -> Result<()> {
    let ds = load_trips(&a.input)?;
    let out = subsample_dataset(&ds, a.interval)?;
    write(&a.out, &formats::write_trips(&out)?)?;
    eprintln!("resample: {} -> {} records at {} s", ds.record_count(), out.record_count(), a.interval);
    Ok(())
}

/// Mode filter, optional subsampling and extraction.
pub fn compute_features(ds: &Dataset, flags: &FeatureFlags) -> Result<Vec<FeatureVector>> {
    let ds = match &flags.modes {
        Some(m) => ds.retain_modes(m),
        None => ds.clone(),
    };
    let ds = match flags.interval {
        Some(k) => subsample_dataset(&ds, k)?,
        None => ds,
    };
    let config = FeatureConfig {
        avgspeed2_denominator: match flags.denominator {
            DenominatorArg::Points => Avgspeed2Denominator::Points,
            DenominatorArg::Velocities => Avgspeed2Denominator::Velocities,
        },
    };
    let (rows, drops) = parallel::dataset_features(&ds, &config);
    eprintln!("features: {} rows, {} trips dropped as too short", rows.len(), drops.count());
    for (id, n) in &drops.dropped {
        eprintln!("  dropped {id} ({n} records)");
    }
    Ok(rows)
}

fn features(a: &FeaturesArgs) -> Result<()> {
    let ds = load_trips(&a.input)?;
    let rows = compute_features(&ds, &a.flags)?;
    write(&a.out, &formats::write_features(&rows)?)
}

fn ks(a: &KsArgs) -> Result<()> {
    let ds = load_trips(&a.input)?;
    let sweep = ks_sweep(&ds, a.mode_a, a.mode_b, &a.intervals)?;
    write(&a.out, &stat_formats::write_ks_sweep(&sweep)?)?;
    if let Some(dir) = &a.histogram_dir {
        fs::create_dir_all(dir)?;
        for &interval in &a.intervals {
            for mode in [a.mode_a, a.mode_b] {
                let d = velocity_distribution(&ds, mode, interval)?;
                write(&dir.join(format!("hist_{mode}_{interval}.csv")), &stat_formats::write_histogram(&d.histogram)?)?;
            }
        }
    }
    for r in &sweep {
        eprintln!("ks: {} s -> {:.4}", r.interval, r.result.statistic);
    }
    Ok(())
}

fn training_rows(features: &[FeatureVector]) -> Result<Vec<Row>> {
    if features.is_empty() {
        bail!("no feature rows");
    }
    Ok(rows_from_features(features))
}

pub fn train_model(features: &[FeatureVector], flags: &ForestFlags, seed: u64) -> Result<ForestModel> {
    Ok(parallel::train_forest(&training_rows(features)?, &flags.params(), seed)?)
}

fn train(a: &TrainArgs) -> Result<()> {
    let model = train_model(&load_features(&a.input)?, &a.forest, a.seed)?;
    write(&a.out, &formats::model_to_json(&model)?)?;
    eprintln!("train: seed {}, {} trees", a.seed, model.trees.len());
    Ok(())
}

pub fn evaluate_features(features: &[FeatureVector], eval: &EvalFlags, forest: &ForestFlags, seed: u64) -> Result<EvalReport> {
    let rows = training_rows(features)?;
    let params = forest.params();
    let report = match eval.kfold {
        Some(k) => parallel::kfold_cv(&rows, k, &params, seed, KFoldOptions { stratified: eval.stratified })?,
        None => holdout(&rows, eval.train_fraction, &params, seed)?.1,
    };
    Ok(report)
}

fn evaluate_cmd(a: &EvaluateArgs) -> Result<()> {
    let features = load_features(&a.input)?;
    let report = match &a.model {
        Some(path) => {
            let model = formats::model_from_json(&read(path)?)?;
            evaluate(&model, &training_rows(&features)?)?
        }
        None => evaluate_features(&features, &a.eval, &a.forest, a.seed)?,
    };
    write(&a.out, &formats::report_to_json(&report)?)?;
    eprintln!("evaluate: seed {}, accuracy {:.4}", report.seed, report.accuracy);
    Ok(())
}

fn predict(a: &PredictArgs) -> Result<()> {
    let model = formats::model_from_json(&read(&a.model)?)?;
    let features = load_features(&a.input)?;
    let mut out = String::from("trip_id,predicted\n");
    for f in &features {
        out.push_str(&format!("{},{}\n", f.trip_id, model.predict_features(f)));
    }
    write(&a.out, &out)
}

/// Output files written by `pipeline`, relative to `--out-dir`.
pub const PIPELINE_FILES: [&str; 6] =
    ["dataset.csv", "clean.csv", "preprocess.json", "features.csv", "model.json", "report.json"];

fn pipeline(a: &PipelineArgs) -> Result<()> {
    fs::create_dir_all(&a.out_dir)?;
    let path = |name: &str| a.out_dir.join(name);
    let raw = match &a.input {
        Some(p) => load_trips(p)?,
        None => parallel::generate_dataset(&SynthSpec::with_seed(a.seed))?,
    };
    write(&path("dataset.csv"), &formats::write_trips(&raw)?)?;
    let (clean, report) = preprocess_dataset(&raw, a.bound)?;
    write(&path("clean.csv"), &formats::write_trips(&clean)?)?;
    write(&path("preprocess.json"), &report_json(&report)?)?;
    let feats = compute_features(&clean, &a.features)?;
    write(&path("features.csv"), &formats::write_features(&feats)?)?;
    let model = train_model(&feats, &a.forest, a.seed)?;
    write(&path("model.json"), &formats::model_to_json(&model)?)?;
    let eval = evaluate_features(&feats, &a.eval, &a.forest, a.seed)?;
    write(&path("report.json"), &formats::report_to_json(&eval)?)?;
    eprintln!("pipeline: seed {}, accuracy {:.4}", a.seed, eval.accuracy);
    Ok(())
}
