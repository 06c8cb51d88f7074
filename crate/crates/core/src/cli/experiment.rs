//! Repeated-run experiments described by a TOML or JSON spec.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::trainers::{fit, AdamSettings, Trainer, TrainerSettings};
use crate::baselines::GreedyConfig;
use crate::ccp::TrainConfig;
use crate::data::{self, Dataset};
use crate::error::{Error, Result};
use crate::eval::{dominance_order, Dominance, Metrics, RunSummary};
use crate::minimax::predict_batch;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DatasetSource {
    Blobs(BlobsSpec),
    Csv(CsvSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlobsSpec {
    pub samples: usize,
    pub features: usize,
    pub centers: usize,
    pub std: f64,
    pub classes: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvSpec {
    pub path: PathBuf,
    #[serde(default = "default_label_column")]
    pub label_column: String,
}

fn default_label_column() -> String {
    "label".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            test_fraction: 0.25,
            seed: 0,
            stratified: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub dataset: DatasetSource,
    #[serde(default)]
    pub split: SplitSpec,
    #[serde(default = "yes")]
    pub scale: bool,
    pub trainers: Vec<Trainer>,
    pub runs: usize,
    #[serde(default)]
    pub seed_base: u64,
    pub output_dir: PathBuf,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub ccp: TrainConfig,
    #[serde(default)]
    pub greedy: GreedyConfig,
    #[serde(default)]
    pub adam: AdamSettings,
}

fn yes() -> bool {
    true
}

fn default_alpha() -> f64 {
    0.01
}

impl ExperimentSpec {
    /// Parses TOML, or JSON when the path ends in `.json`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let spec: ExperimentSpec = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::Spec(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| Error::Spec(e.to_string()))?
        };
        let base = path.parent().unwrap_or(Path::new(""));
        let mut spec = spec;
        if let DatasetSource::Csv(c) = &mut spec.dataset {
            if c.path.is_relative() {
                c.path = base.join(&c.path);
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn settings(&self) -> TrainerSettings {
        TrainerSettings {
            ccp: self.ccp.clone(),
            greedy: self.greedy.clone(),
            adam: self.adam.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Spec(m));
        if self.runs == 0 {
            return bad("runs must be >= 1".into());
        }
        if self.trainers.is_empty() {
            return bad("at least one trainer is required".into());
        }
        for (i, t) in self.trainers.iter().enumerate() {
            if self.trainers[..i].contains(t) {
                return bad(format!("trainer {} listed twice", t.name()));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if !(self.split.test_fraction > 0.0 && self.split.test_fraction < 1.0) {
            return bad(format!(
                "split.test_fraction must lie in (0, 1), got {}",
                self.split.test_fraction
            ));
        }
        if let DatasetSource::Blobs(b) = &self.dataset {
            if b.samples == 0 || b.features == 0 || b.classes < 2 || b.centers < b.classes {
                return bad("blobs need samples, features >= 1, classes >= 2 and centers >= classes".into());
            }
            if !(b.std >= 0.0 && b.std.is_finite()) {
                return bad("blobs std must be finite and >= 0".into());
            }
        }
        let settings = self.settings();
        for &t in &self.trainers {
            settings
                .validate(t)
                .map_err(|e| Error::Spec(format!("[{}] {e}", t.name())))?;
        }
        Ok(())
    }

    pub fn dataset(&self) -> Result<Dataset> {
        match &self.dataset {
            DatasetSource::Blobs(b) => data::make_blobs(b.samples, b.features, b.centers, b.std, b.classes, b.seed),
            DatasetSource::Csv(c) => data::load_csv(&c.path, &c.label_column),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub run: usize,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainerReport {
    pub trainer: Trainer,
    pub label: String,
    pub seeds: Vec<u64>,
    pub train: RunSummary,
    pub test: RunSummary,
    /// True when a single run makes every standard deviation a placeholder 0.
    pub single_run: bool,
    pub failures: Vec<RunFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub trainers: Vec<TrainerReport>,
    pub dominance: Vec<Dominance>,
    pub alpha: f64,
}

impl ExperimentReport {
    pub fn get(&self, t: Trainer) -> Option<&TrainerReport> {
        self.trainers.iter().find(|r| r.trainer == t)
    }

    pub fn failed(&self) -> bool {
        self.trainers.iter().any(|r| !r.failures.is_empty())
    }

    /// Plain-text table with mean±std per metric.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<12} {:>14} {:>14} {:>16} {:>16} {:>14}",
            "Method", "F1 train", "F1 test", "Miscl. train (%)", "Miscl. test (%)", "Time (s)"
        );
        for r in &self.trainers {
            let cell = |m: f64, sd: f64, p: usize| format!("{m:.p$}±{sd:.p$}");
            let _ = writeln!(
                s,
                "{:<12} {:>14} {:>14} {:>16} {:>16} {:>14}{}",
                r.label,
                cell(r.train.macro_f1.mean, r.train.macro_f1.std, 3),
                cell(r.test.macro_f1.mean, r.test.macro_f1.std, 3),
                cell(
                    r.train.misclassification_rate.mean,
                    r.train.misclassification_rate.std,
                    1
                ),
                cell(r.test.misclassification_rate.mean, r.test.misclassification_rate.std, 1),
                cell(r.train.wall_time_seconds.mean, r.train.wall_time_seconds.std, 3),
                if r.single_run {
                    "  (1 run, std not estimated)"
                } else {
                    ""
                },
            );
        }
        if !self.dominance.is_empty() {
            let _ = writeln!(
                s,
                "\nSignificant wins on test F1 (paired t-test, alpha = {}):",
                self.alpha
            );
            for d in &self.dominance {
                let _ = writeln!(
                    s,
                    "  {} > {}  (t = {:.3}, p = {:.3e})",
                    d.winner, d.loser, d.t, d.p_two_sided
                );
            }
        }
        s
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let put = |name: &str, text: String| {
            let p = dir.join(name);
            fs::write(&p, text).map_err(|e| Error::io(p, e))
        };
        for r in &self.trainers {
            put(
                &format!("summary_{}.json", r.trainer.name()),
                serde_json::to_string_pretty(r)?,
            )?;
        }
        put("dominance.json", serde_json::to_string_pretty(&self.dominance)?)?;
        put("table.txt", self.table())?;
        let timing: Vec<serde_json::Value> = self
            .trainers
            .iter()
            .map(|r| {
                serde_json::json!({
                    "trainer": r.trainer,
                    "mean_seconds": r.train.wall_time_seconds.mean,
                    "std_seconds": r.train.wall_time_seconds.std,
                })
            })
            .collect();
        put("timing.json", serde_json::to_string_pretty(&timing)?)
    }
}

/// Fixed split and scaling shared by every run.
pub fn prepare_data(spec: &ExperimentSpec) -> Result<(Dataset, Dataset)> {
    let ds = spec.dataset()?;
    let (train, test) = data::train_test_split(&ds, spec.split.test_fraction, spec.split.seed, spec.split.stratified)?;
    if spec.scale {
        let sc = data::fit_scaler(&train);
        Ok((data::apply_scaler(&train, &sc)?, data::apply_scaler(&test, &sc)?))
    } else {
        Ok((train, test))
    }
}

/// Runs every trainer `spec.runs` times, with training seed `seed_base + run`.
pub fn run_experiment(
    spec: &ExperimentSpec,
    mut progress: impl FnMut(Trainer, usize, Option<f64>),
) -> Result<ExperimentReport> {
    spec.validate()?;
    let (train, test) = prepare_data(spec)?;
    let settings = spec.settings();
    let s = train.n_classes();
    let mut reports = Vec::new();
    for &trainer in &spec.trainers {
        let mut train_runs = Vec::new();
        let mut test_runs = Vec::new();
        let mut seeds = Vec::new();
        let mut failures = Vec::new();
        for run in 0..spec.runs {
            let seed = spec.seed_base + run as u64;
            let started = Instant::now();
            let outcome = fit(trainer, &settings, &train, seed).and_then(|f| {
                let secs = started.elapsed().as_secs_f64();
                let tr = Metrics::compute(train.labels(), &predict_batch(train.features(), &f.model)?, s, secs)?;
                let te = Metrics::compute(test.labels(), &predict_batch(test.features(), &f.model)?, s, secs)?;
                Ok((tr, te))
            });
            progress(trainer, run, outcome.as_ref().ok().map(|(_, te)| te.macro_f1));
            match outcome {
                Ok((tr, te)) => {
                    train_runs.push(tr);
                    test_runs.push(te);
                    seeds.push(seed);
                }
                Err(e) => failures.push(RunFailure {
                    run,
                    seed,
                    error: e.to_string(),
                }),
            }
        }
        reports.push(TrainerReport {
            trainer,
            label: trainer.label().into(),
            single_run: train_runs.len() == 1,
            seeds,
            train: RunSummary::from_runs(train_runs),
            test: RunSummary::from_runs(test_runs),
            failures,
        });
    }
    let usable: Vec<&TrainerReport> = reports.iter().filter(|r| r.test.runs.len() >= 2).collect();
    let same_len = usable.windows(2).all(|w| w[0].test.runs.len() == w[1].test.runs.len());
    let dominance = if usable.len() >= 2 && same_len {
        let names: Vec<String> = usable.iter().map(|r| r.label.clone()).collect();
        let scores: Vec<Vec<f64>> = usable.iter().map(|r| r.test.f1_scores()).collect();
        dominance_order(&names, &scores, spec.alpha)?
    } else {
        Vec::new()
    };
    Ok(ExperimentReport {
        trainers: reports,
        dominance,
        alpha: spec.alpha,
    })
}
