//! Classification metrics, repeated-run summaries and paired t-tests.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

fn check_labels(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Result<()> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            found: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(Error::InvalidDataset("no labels to score".into()));
    }
    if let Some(&l) = y_true.iter().chain(y_pred).find(|&&l| l == 0 || l > n_classes) {
        return Err(Error::InvalidDataset(format!("label {l} outside 1..={n_classes}")));
    }
    Ok(())
}

/// `S x S` counts: `m[t][p]` samples of true class `t+1` predicted as `p+1`.
pub fn confusion_matrix(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Result<Vec<Vec<usize>>> {
    check_labels(y_true, y_pred, n_classes)?;
    let mut m = vec![vec![0; n_classes]; n_classes];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        m[t - 1][p - 1] += 1;
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    #[default]
    Macro,
    Micro,
}

fn f1_from_confusion(m: &[Vec<usize>], averaging: Averaging) -> f64 {
    let s = m.len();
    let tp = |c: usize| m[c][c] as f64;
    let pred = |c: usize| (0..s).map(|t| m[t][c]).sum::<usize>() as f64;
    let actual = |c: usize| m[c].iter().sum::<usize>() as f64;
    let f1 = |tp: f64, pred: f64, actual: f64| {
        let p = if pred > 0.0 { tp / pred } else { 0.0 };
        let r = if actual > 0.0 { tp / actual } else { 0.0 };
        if p + r > 0.0 {
            2.0 * p * r / (p + r)
        } else {
            0.0
        }
    };
    match averaging {
        Averaging::Macro => (0..s).map(|c| f1(tp(c), pred(c), actual(c))).sum::<f64>() / s as f64,
        Averaging::Micro => {
            let t: f64 = (0..s).map(tp).sum();
            let total: f64 = (0..s).map(actual).sum();
            f1(t, total, total)
        }
    }
}

/// F1 score averaged over classes. Classes with `P + R = 0` count as 0.
pub fn f1_score(y_true: &[usize], y_pred: &[usize], n_classes: usize, averaging: Averaging) -> Result<f64> {
    let m = confusion_matrix(y_true, y_pred, n_classes)?;
    Ok(f1_from_confusion(&m, averaging))
}

pub fn macro_f1(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Result<f64> {
    f1_score(y_true, y_pred, n_classes, Averaging::Macro)
}

/// Percentage of mismatched labels.
pub fn error_rate(y_true: &[usize], y_pred: &[usize]) -> Result<f64> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            found: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(Error::InvalidDataset("no labels to score".into()));
    }
    let wrong = y_true.iter().zip(y_pred).filter(|(a, b)| a != b).count();
    Ok(100.0 * wrong as f64 / y_true.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub macro_f1: f64,
    /// Percent of misclassified samples.
    pub misclassification_rate: f64,
    pub confusion: Vec<Vec<usize>>,
    pub wall_time_seconds: f64,
}

impl Metrics {
    pub fn compute(y_true: &[usize], y_pred: &[usize], n_classes: usize, wall_time_seconds: f64) -> Result<Self> {
        let confusion = confusion_matrix(y_true, y_pred, n_classes)?;
        Ok(Metrics {
            macro_f1: f1_from_confusion(&confusion, Averaging::Macro),
            misclassification_rate: error_rate(y_true, y_pred)?,
            confusion,
            wall_time_seconds,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        if values.is_empty() {
            return Stat {
                mean: f64::NAN,
                std: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Stat { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub runs: Vec<Metrics>,
    pub macro_f1: Stat,
    pub misclassification_rate: Stat,
    pub wall_time_seconds: Stat,
}

impl RunSummary {
    pub fn from_runs(runs: Vec<Metrics>) -> Self {
        let col = |f: fn(&Metrics) -> f64| Stat::of(&runs.iter().map(f).collect::<Vec<_>>());
        RunSummary {
            macro_f1: col(|m| m.macro_f1),
            misclassification_rate: col(|m| m.misclassification_rate),
            wall_time_seconds: col(|m| m.wall_time_seconds),
            runs,
        }
    }

    pub fn f1_scores(&self) -> Vec<f64> {
        self.runs.iter().map(|m| m.macro_f1).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    /// `+inf`/`-inf` when the differences are constant and nonzero.
    pub t: f64,
    pub dof: usize,
    pub p_two_sided: f64,
}

/// Two-sided p-value of Student's t with `dof` degrees of freedom.
pub fn t_two_sided_p(t: f64, dof: usize) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let v = dof as f64;
    beta_reg(v / 2.0, 0.5, v / (v + t * t))
}

/// Paired t-test on `a - b`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::InvalidConfig("paired t-test needs at least 2 pairs".into()));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("paired scores"));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let dof = d.len() - 1;
    let s = Stat::of(&d);
    if s.std == 0.0 || s.std <= 1e-15 * s.mean.abs() {
        return Ok(if s.mean == 0.0 {
            TTest {
                t: 0.0,
                dof,
                p_two_sided: 1.0,
            }
        } else {
            TTest {
                t: f64::INFINITY.copysign(s.mean),
                dof,
                p_two_sided: 0.0,
            }
        });
    }
    let t = s.mean / (s.std / (d.len() as f64).sqrt());
    Ok(TTest {
        t,
        dof,
        p_two_sided: t_two_sided_p(t, dof),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dominance {
    pub winner: String,
    pub loser: String,
    pub t: f64,
    pub p_two_sided: f64,
}

/// Every ordered pair where the first method's mean is higher and the paired
/// test rejects equality at `alpha`.
pub fn dominance_order(names: &[String], scores: &[Vec<f64>], alpha: f64) -> Result<Vec<Dominance>> {
    if names.is_empty() || names.len() != scores.len() {
        return Err(Error::InvalidConfig(format!(
            "need one score list per method ({} names, {} lists)",
            names.len(),
            scores.len()
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig("alpha must lie in (0, 1)".into()));
    }
    let mut edges = Vec::new();
    for i in 0..names.len() {
        for j in 0..names.len() {
            if i == j {
                continue;
            }
            let test = paired_t_test(&scores[i], &scores[j])?;
            if test.t > 0.0 && test.p_two_sided < alpha {
                edges.push(Dominance {
                    winner: names[i].clone(),
                    loser: names[j].clone(),
                    t: test.t,
                    p_two_sided: test.p_two_sided,
                });
            }
        }
    }
    Ok(edges)
}
