//! Uniform front end over the three trainers.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model_file::{ClassSummary, Metadata};
use crate::baselines::{self, AdamConfig, GreedyConfig};
use crate::ccp::{self, TrainConfig};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::minimax::MpclModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Trainer {
    Ccp,
    Greedy,
    Adam,
}

impl Trainer {
    pub fn name(self) -> &'static str {
        match self {
            Trainer::Ccp => "ccp",
            Trainer::Greedy => "greedy",
            Trainer::Adam => "adam",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Trainer::Ccp => "MPCL-CCP",
            Trainer::Greedy => "MPCL-Greedy",
            Trainer::Adam => "MPCL-Adam",
        }
    }
}

/// Adam settings plus the number of boxes it starts from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdamSettings {
    pub boxes_per_class: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_hat: f64,
}

impl Default for AdamSettings {
    fn default() -> Self {
        let c = AdamConfig::default();
        AdamSettings {
            boxes_per_class: 4,
            learning_rate: c.learning_rate,
            epochs: c.epochs,
            beta1: c.beta1,
            beta2: c.beta2,
            eps_hat: c.eps_hat,
        }
    }
}

impl AdamSettings {
    pub fn config(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            beta1: self.beta1,
            beta2: self.beta2,
            eps_hat: self.eps_hat,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.boxes_per_class == 0 {
            return Err(Error::InvalidConfig("boxes per class must be >= 1".into()));
        }
        self.config().validate()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainerSettings {
    pub ccp: TrainConfig,
    pub greedy: GreedyConfig,
    pub adam: AdamSettings,
}

impl TrainerSettings {
    pub fn validate(&self, trainer: Trainer) -> Result<()> {
        match trainer {
            Trainer::Ccp => self.ccp.validate(),
            Trainer::Greedy if self.greedy.max_boxes_per_class == 0 => {
                Err(Error::InvalidConfig("max boxes per class must be >= 1".into()))
            }
            Trainer::Greedy => Ok(()),
            Trainer::Adam => self.adam.validate(),
        }
    }
}

/// Rows of the per-step trace file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TraceTable {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl TraceTable {
    pub fn write(&self, path: &Path) -> Result<()> {
        let io = |e: csv::Error| match e.into_kind() {
            csv::ErrorKind::Io(e) => Error::io(path, e),
            other => Error::InvalidDataset(format!("{other:?}")),
        };
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone)]
pub struct Fitted {
    pub model: MpclModel,
    pub metadata: Metadata,
    pub trace: TraceTable,
    pub warnings: Vec<String>,
}

fn to_value<T: Serialize>(v: &T) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(v)?)
}

/// Trains `trainer` on `ds`; `seed` drives every random choice.
pub fn fit(trainer: Trainer, settings: &TrainerSettings, ds: &Dataset, seed: u64) -> Result<Fitted> {
    settings.validate(trainer)?;
    match trainer {
        Trainer::Ccp => {
            let cfg = TrainConfig {
                seed,
                ..settings.ccp.clone()
            };
            let (model, traces) = ccp::train(ds, &cfg)?;
            let mut trace = TraceTable {
                header: vec!["class", "iteration", "objective", "pivots", "seconds"],
                rows: Vec::new(),
            };
            let mut summary = Vec::new();
            for t in &traces {
                for it in &t.iterations {
                    trace.rows.push(vec![
                        t.class_id.to_string(),
                        it.iteration.to_string(),
                        it.objective.to_string(),
                        it.pivots.to_string(),
                        it.seconds.to_string(),
                    ]);
                }
                summary.push(ClassSummary {
                    class_id: t.class_id,
                    steps: t.iterations.len(),
                    final_objective: t.final_objective(),
                    converged: t.converged,
                    impure_boxes: 0,
                });
            }
            let warnings = traces
                .iter()
                .filter(|t| !t.converged)
                .map(|t| format!("class {} hit the outer iteration cap", t.class_id))
                .collect();
            Ok(Fitted {
                model,
                metadata: Metadata {
                    trainer: trainer.name().into(),
                    config: to_value(&cfg)?,
                    seed,
                    trace_summary: summary,
                },
                trace,
                warnings,
            })
        }
        Trainer::Greedy => {
            let out = baselines::train_greedy(ds, &settings.greedy)?;
            let mut trace = TraceTable {
                header: vec!["class", "boxes", "impure_boxes"],
                rows: Vec::new(),
            };
            let mut summary = Vec::new();
            for m in out.model.modules() {
                let impure = out.impure.iter().filter(|w| w.class_id == m.class_id()).count();
                trace.rows.push(vec![
                    m.class_id().to_string(),
                    m.boxes().len().to_string(),
                    impure.to_string(),
                ]);
                summary.push(ClassSummary {
                    class_id: m.class_id(),
                    steps: m.boxes().len(),
                    final_objective: None,
                    converged: impure == 0,
                    impure_boxes: impure,
                });
            }
            let warnings = out
                .impure
                .iter()
                .map(|w| {
                    format!(
                        "class {} box {} still holds {} foreign samples",
                        w.class_id, w.box_index, w.negatives_inside
                    )
                })
                .collect();
            Ok(Fitted {
                model: out.model,
                metadata: Metadata {
                    trainer: trainer.name().into(),
                    config: to_value(&settings.greedy)?,
                    seed,
                    trace_summary: summary,
                },
                trace,
                warnings,
            })
        }
        Trainer::Adam => {
            let a = &settings.adam;
            let (model, traces) = baselines::train_adam(ds, &a.config(), a.boxes_per_class, seed)?;
            let mut trace = TraceTable {
                header: vec!["class", "epoch", "loss"],
                rows: Vec::new(),
            };
            let mut summary = Vec::new();
            for t in &traces {
                for (e, loss) in t.losses.iter().enumerate() {
                    trace
                        .rows
                        .push(vec![t.class_id.to_string(), (e + 1).to_string(), loss.to_string()]);
                }
                summary.push(ClassSummary {
                    class_id: t.class_id,
                    steps: t.losses.len(),
                    final_objective: t.losses.last().copied(),
                    converged: false,
                    impure_boxes: 0,
                });
            }
            Ok(Fitted {
                model,
                metadata: Metadata {
                    trainer: trainer.name().into(),
                    config: to_value(a)?,
                    seed,
                    trace_summary: summary,
                },
                trace,
                warnings: Vec::new(),
            })
        }
    }
}
