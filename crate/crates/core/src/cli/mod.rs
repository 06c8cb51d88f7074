//! Command-line front end: `gen`, `train`, `eval`, `experiment` and
//! `export-plot-data`.
//!
//! Exit codes: 0 on success, 1 on runtime failure, 2 on usage or
//! validation errors. `MORPHBOX_THREADS` caps the worker pool.

mod experiment;
mod model_file;
mod trainers;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

pub use experiment::{
    prepare_data, run_experiment, BlobsSpec, CsvSpec, DatasetSource, ExperimentReport, ExperimentSpec, RunFailure,
    SplitSpec, TrainerReport,
};
pub use model_file::{ClassEntry, ClassSummary, Metadata, ModelFile, FORMAT_VERSION};
pub use trainers::{fit, AdamSettings, Fitted, TraceTable, Trainer, TrainerSettings};

use crate::baselines::{GreedyConfig, Purity};
use crate::ccp::TrainConfig;
use crate::data::{self, Dataset};
use crate::error::{Error, Result};
use crate::eval::Metrics;
use crate::minimax::predict_batch;

pub const THREADS_ENV: &str = "MORPHBOX_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "morphbox",
    version,
    about = "Hyperbox classifiers trained by the convex-concave procedure"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a Gaussian blob dataset as CSV.
    Gen(GenArgs),
    /// Train a model on a CSV dataset.
    Train(TrainArgs),
    /// Evaluate a saved model on a CSV dataset.
    Eval(EvalArgs),
    /// Run a repeated-run experiment from a TOML or JSON spec.
    Experiment(ExperimentArgs),
    /// Write hyperbox and decision-grid CSVs for a 2-feature model.
    ExportPlotData(ExportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 1200)]
    pub samples: usize,
    #[arg(long, default_value_t = 2)]
    pub features: usize,
    #[arg(long, default_value_t = 12)]
    pub centers: usize,
    #[arg(long, default_value_t = 1.5)]
    pub std: f64,
    #[arg(long, default_value_t = 3)]
    pub classes: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    /// Training data (CSV with a header row).
    pub data: PathBuf,
    #[arg(long, value_enum, default_value_t = Trainer::Ccp)]
    pub trainer: Trainer,
    /// Boxes per class (ccp, adam).
    #[arg(long, default_value_t = 4)]
    pub boxes: usize,
    #[arg(long, default_value_t = 0.01)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, default_value_t = 0.0)]
    pub margin: f64,
    /// Box cap per class for the greedy trainer.
    #[arg(long, default_value_t = GreedyConfig::default().max_boxes_per_class)]
    pub max_boxes: usize,
    #[arg(long, value_enum, default_value_t = PurityArg::Strict)]
    pub purity: PurityArg,
    #[arg(long, default_value_t = 0.001)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    /// Held-out fraction; 0 trains on every row.
    #[arg(long, default_value_t = 0.25)]
    pub test_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub split_seed: u64,
    #[arg(long)]
    pub no_stratify: bool,
    #[arg(long)]
    pub no_scale: bool,
    #[arg(long, default_value = "label")]
    pub label_column: String,
    #[arg(short, long, default_value = "model.json")]
    pub output: PathBuf,
    /// Trace CSV path (defaults to the model path with a `.trace.csv` suffix).
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PurityArg {
    Strict,
    Majority,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    pub model: PathBuf,
    pub data: PathBuf,
    #[arg(long, default_value = "label")]
    pub label_column: String,
    /// Also write the metrics JSON here.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    pub spec: PathBuf,
    /// Overrides the spec's output directory.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExportArgs {
    pub model: PathBuf,
    pub data: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub resolution: usize,
    #[arg(long, default_value = "label")]
    pub label_column: String,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

/// Maps an error to the process exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } | Error::Lp(_) | Error::SubproblemStatus { .. } => 1,
        _ => 2,
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::InvalidConfig(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // A second call in the same process keeps the pool built by the first.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = configure_threads().and_then(|_| match &cli.command {
        Command::Gen(a) => cmd_gen(a).map(|_| 0),
        Command::Train(a) => cmd_train(a).map(|_| 0),
        Command::Eval(a) => cmd_eval(a).map(|_| 0),
        Command::Experiment(a) => cmd_experiment(a).map(|r| i32::from(r.failed())),
        Command::ExportPlotData(a) => cmd_export_plot_data(a).map(|_| 0),
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn class_counts_text(ds: &Dataset) -> String {
    ds.class_counts()
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join("/")
}

pub fn cmd_gen(a: &GenArgs) -> Result<Dataset> {
    let ds = data::make_blobs(a.samples, a.features, a.centers, a.std, a.classes, a.seed)?;
    data::save_csv(&ds, &a.output)?;
    println!(
        "wrote {} rows ({} features, {} classes: {}) to {}",
        ds.len(),
        ds.n_features(),
        ds.n_classes(),
        class_counts_text(&ds),
        a.output.display()
    );
    Ok(ds)
}

/// Outcome of `train`: the written model and its metrics.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model_file: ModelFile,
    pub train_metrics: Metrics,
    pub test_metrics: Option<Metrics>,
    pub warnings: Vec<String>,
}

impl TrainArgs {
    pub fn settings(&self) -> TrainerSettings {
        TrainerSettings {
            ccp: TrainConfig {
                boxes_per_class: self.boxes,
                gamma: self.gamma,
                max_outer_iters: self.max_iters,
                objective_tol: self.tol,
                seed: self.seed,
                margin: self.margin,
                ..TrainConfig::default()
            },
            greedy: GreedyConfig {
                max_boxes_per_class: self.max_boxes,
                purity: match self.purity {
                    PurityArg::Strict => Purity::Strict,
                    PurityArg::Majority => Purity::Majority,
                },
            },
            adam: AdamSettings {
                boxes_per_class: self.boxes,
                learning_rate: self.learning_rate,
                epochs: self.epochs,
                ..AdamSettings::default()
            },
        }
    }

    pub fn trace_path(&self) -> PathBuf {
        self.trace.clone().unwrap_or_else(|| {
            let stem = self
                .output
                .file_stem()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned();
            self.output.with_file_name(format!("{stem}.trace.csv"))
        })
    }
}

fn print_metrics(name: &str, m: &Metrics) {
    println!(
        "{name:<5} macro-F1 {:.4}  misclassified {:.2}%  ({} samples)",
        m.macro_f1,
        m.misclassification_rate,
        m.confusion.iter().flatten().sum::<usize>()
    );
}

pub fn cmd_train(a: &TrainArgs) -> Result<TrainOutcome> {
    let settings = a.settings();
    settings.validate(a.trainer)?;
    if !(0.0..1.0).contains(&a.test_fraction) {
        return Err(Error::InvalidConfig(format!(
            "test fraction must lie in [0, 1), got {}",
            a.test_fraction
        )));
    }
    let ds = data::load_csv(&a.data, &a.label_column)?;
    let (train, test) = if a.test_fraction > 0.0 {
        let (tr, te) = data::train_test_split(&ds, a.test_fraction, a.split_seed, !a.no_stratify)?;
        (tr, Some(te))
    } else {
        (ds.clone(), None)
    };
    let scaler = (!a.no_scale).then(|| data::fit_scaler(&train));
    let scale = |d: &Dataset| match &scaler {
        Some(s) => data::apply_scaler(d, s),
        None => Ok(d.clone()),
    };
    let train_s = scale(&train)?;
    let started = Instant::now();
    let fitted = fit(a.trainer, &settings, &train_s, a.seed)?;
    let secs = started.elapsed().as_secs_f64();
    for w in &fitted.warnings {
        eprintln!("warning: {w}");
    }

    let s = ds.n_classes();
    let train_metrics = Metrics::compute(
        train_s.labels(),
        &predict_batch(train_s.features(), &fitted.model)?,
        s,
        secs,
    )?;
    let test_metrics = match &test {
        Some(te) => {
            let te = scale(te)?;
            Some(Metrics::compute(
                te.labels(),
                &predict_batch(te.features(), &fitted.model)?,
                s,
                secs,
            )?)
        }
        None => None,
    };
    let names = ds.feature_names().map(|n| n.to_vec());
    let model_file = ModelFile::new(&fitted.model, fitted.metadata.clone(), scaler, names);
    model_file.save(&a.output)?;
    fitted.trace.write(&a.trace_path())?;

    println!(
        "trained {} ({} boxes over {} classes) in {:.3}s -> {}",
        a.trainer.label(),
        fitted.model.box_count(),
        s,
        secs,
        a.output.display()
    );
    print_metrics("train", &train_metrics);
    if let Some(m) = &test_metrics {
        print_metrics("test", m);
    }
    Ok(TrainOutcome {
        model_file,
        train_metrics,
        test_metrics,
        warnings: fitted.warnings,
    })
}

pub fn cmd_eval(a: &EvalArgs) -> Result<Metrics> {
    let file = ModelFile::load(&a.model)?;
    let model = file.model()?;
    let ds = data::load_csv(&a.data, &a.label_column)?;
    if ds.n_classes() > model.n_classes() {
        return Err(Error::InvalidDataset(format!(
            "data has labels up to {} but the model knows {} classes",
            ds.n_classes(),
            model.n_classes()
        )));
    }
    let ds = file.prepare(&ds)?;
    let started = Instant::now();
    let pred = predict_batch(ds.features(), &model)?;
    let metrics = Metrics::compute(ds.labels(), &pred, model.n_classes(), started.elapsed().as_secs_f64())?;
    let text = serde_json::to_string_pretty(&metrics)?;
    println!("{text}");
    if let Some(out) = &a.output {
        fs::write(out, text + "\n").map_err(|e| Error::io(out, e))?;
    }
    Ok(metrics)
}

pub fn cmd_experiment(a: &ExperimentArgs) -> Result<ExperimentReport> {
    let mut spec = ExperimentSpec::load(&a.spec)?;
    if let Some(dir) = &a.output_dir {
        spec.output_dir = dir.clone();
    }
    let report = run_experiment(&spec, |t, run, f1| match f1 {
        Some(f) => eprintln!("{} run {}/{}: test F1 {f:.4}", t.name(), run + 1, spec.runs),
        None => eprintln!("{} run {}/{}: failed", t.name(), run + 1, spec.runs),
    })?;
    report.write(&spec.output_dir)?;
    print!("{}", report.table());
    for r in &report.trainers {
        for f in &r.failures {
            eprintln!(
                "error: {} run {} (seed {}): {}",
                r.trainer.name(),
                f.run,
                f.seed,
                f.error
            );
        }
    }
    Ok(report)
}

/// Cell centres of a `resolution x resolution` grid over the data bounds
/// widened by 10% of the range on every side.
pub fn grid_points(ds: &Dataset, resolution: usize) -> Result<Vec<[f64; 2]>> {
    if ds.n_features() != 2 {
        return Err(Error::UnsupportedDimension {
            found: ds.n_features(),
            supported: 2,
        });
    }
    if resolution == 0 {
        return Err(Error::InvalidConfig("grid resolution must be >= 1".into()));
    }
    let (lo, hi) = ds.bounds();
    let axis = |i: usize| {
        let range = hi[i] - lo[i];
        let pad = if range > 0.0 { 0.1 * range } else { 0.5 };
        let (a, b) = (lo[i] - pad, hi[i] + pad);
        let step = (b - a) / resolution as f64;
        (0..resolution).map(|k| a + (k as f64 + 0.5) * step).collect::<Vec<_>>()
    };
    let (xs, ys) = (axis(0), axis(1));
    Ok(ys.iter().flat_map(|&y| xs.iter().map(move |&x| [x, y])).collect())
}

fn write_csv(path: &Path, header: &[&'static str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    TraceTable {
        header: header.to_vec(),
        rows: rows.into_iter().collect(),
    }
    .write(path)
}

/// Writes `hyperboxes.csv` and `grid.csv` in the data's original units.
pub fn cmd_export_plot_data(a: &ExportArgs) -> Result<(PathBuf, PathBuf)> {
    let file = ModelFile::load(&a.model)?;
    let model = file.model()?;
    if model.n_features() != 2 {
        return Err(Error::UnsupportedDimension {
            found: model.n_features(),
            supported: 2,
        });
    }
    let ds = data::load_csv(&a.data, &a.label_column)?;
    crate::error::check_dim(2, ds.n_features())?;
    let grid = grid_points(&ds, a.resolution)?;
    let mut flat: Vec<f64> = grid.iter().flatten().copied().collect();
    if let Some(s) = &file.scaler {
        for row in flat.chunks_mut(2) {
            s.transform_row(row);
        }
    }
    let labels = predict_batch(&flat, &model)?;
    fs::create_dir_all(&a.out_dir).map_err(|e| Error::io(&a.out_dir, e))?;

    let unscale = |i: usize, v: f64| match &file.scaler {
        Some(s) => v * s.std[i] + s.mean[i],
        None => v,
    };
    let boxes_path = a.out_dir.join("hyperboxes.csv");
    let box_rows = model.modules().iter().flat_map(|m| {
        m.boxes().iter().enumerate().map(move |(k, b)| {
            vec![
                m.class_id().to_string(),
                k.to_string(),
                unscale(0, b.lower()[0]).to_string(),
                unscale(1, b.lower()[1]).to_string(),
                unscale(0, b.upper()[0]).to_string(),
                unscale(1, b.upper()[1]).to_string(),
            ]
        })
    });
    write_csv(
        &boxes_path,
        &["class", "box", "lower_0", "lower_1", "upper_0", "upper_1"],
        box_rows,
    )?;

    let grid_path = a.out_dir.join("grid.csv");
    let grid_rows = grid
        .iter()
        .zip(&labels)
        .map(|(p, l)| vec![p[0].to_string(), p[1].to_string(), l.to_string()]);
    write_csv(&grid_path, &["x0", "x1", "label"], grid_rows)?;
    println!(
        "wrote {} boxes to {} and {} grid cells to {}",
        model.box_count(),
        boxes_path.display(),
        grid.len(),
        grid_path.display()
    );
    Ok((boxes_path, grid_path))
}
