//! Greedy constructive hyperbox trainer.
//!
//! This is a reconstruction of the classic constructive approach: for every
//! class, start from the bounding box of its samples and keep splitting
//! boxes that enclose foreign samples until every box is pure.
//!
//! A split cuts the current set of positives at a threshold on one
//! coordinate, halfway between an enclosed negative and the nearest positive
//! on either side of it. Each side is replaced by the bounding box of its
//! positives. Among all candidate cuts, the one leaving the fewest negatives
//! inside the two child boxes wins (then the most balanced cut, then the
//! lowest dimension and threshold). Everything is deterministic.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::minimax::{ClassModule, Hyperbox, MpclModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Purity {
    /// No foreign sample may remain inside a box.
    Strict,
    /// A box is accepted once its own samples outnumber foreign ones.
    Majority,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GreedyConfig {
    pub max_boxes_per_class: usize,
    pub purity: Purity,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        GreedyConfig {
            max_boxes_per_class: 32,
            purity: Purity::Strict,
        }
    }
}

/// A box emitted while foreign samples were still inside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpureBox {
    pub class_id: usize,
    pub box_index: usize,
    pub negatives_inside: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyOutcome {
    pub model: MpclModel,
    pub impure: Vec<ImpureBox>,
}

fn bounding_box(points: &[&[f64]]) -> (Vec<f64>, Vec<f64>) {
    let n = points[0].len();
    let mut lo = points[0].to_vec();
    let mut hi = points[0].to_vec();
    for p in &points[1..] {
        for i in 0..n {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    (lo, hi)
}

fn inside(x: &[f64], lo: &[f64], hi: &[f64]) -> bool {
    x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| a <= v && v <= b)
}

fn count_inside(negs: &[&[f64]], pos: &[&[f64]]) -> usize {
    if pos.is_empty() {
        return 0;
    }
    let (lo, hi) = bounding_box(pos);
    negs.iter().filter(|x| inside(x, &lo, &hi)).count()
}

struct Cut {
    dim: usize,
    threshold: f64,
    remaining: usize,
    imbalance: usize,
}

fn best_cut(pos: &[&[f64]], offending: &[&[f64]]) -> Option<Cut> {
    let n = pos[0].len();
    let mut best: Option<Cut> = None;
    for dim in 0..n {
        let mut thresholds = Vec::new();
        for v in offending {
            let below = pos
                .iter()
                .map(|p| p[dim])
                .filter(|&c| c < v[dim])
                .fold(f64::NEG_INFINITY, f64::max);
            let above = pos
                .iter()
                .map(|p| p[dim])
                .filter(|&c| c > v[dim])
                .fold(f64::INFINITY, f64::min);
            if below.is_finite() {
                thresholds.push(0.5 * (below + v[dim]));
            }
            if above.is_finite() {
                thresholds.push(0.5 * (v[dim] + above));
            }
        }
        thresholds.sort_by(f64::total_cmp);
        thresholds.dedup();
        for threshold in thresholds {
            let (left, right): (Vec<&[f64]>, Vec<&[f64]>) = pos.iter().partition(|p| p[dim] <= threshold);
            if left.is_empty() || right.is_empty() {
                continue;
            }
            let remaining = count_inside(offending, &left) + count_inside(offending, &right);
            let imbalance = left.len().abs_diff(right.len());
            let better = match &best {
                None => true,
                Some(b) => (remaining, imbalance) < (b.remaining, b.imbalance),
            };
            if better {
                best = Some(Cut {
                    dim,
                    threshold,
                    remaining,
                    imbalance,
                });
            }
        }
    }
    best
}

fn acceptable(purity: Purity, positives: usize, negatives: usize) -> bool {
    match purity {
        Purity::Strict => negatives == 0,
        Purity::Majority => positives > negatives,
    }
}

fn train_class(ds: &Dataset, class_id: usize, cfg: &GreedyConfig) -> Result<(Vec<Hyperbox>, Vec<ImpureBox>)> {
    let mut pos: Vec<&[f64]> = Vec::new();
    let mut neg: Vec<&[f64]> = Vec::new();
    for (row, &l) in ds.rows().zip(ds.labels()) {
        if l == class_id {
            pos.push(row);
        } else {
            neg.push(row);
        }
    }
    if pos.is_empty() {
        return Err(Error::EmptyClass(class_id));
    }

    let mut finished: Vec<Hyperbox> = Vec::new();
    let mut impure = Vec::new();
    let mut stack: Vec<Vec<&[f64]>> = vec![pos];
    while let Some(group) = stack.pop() {
        let (lo, hi) = bounding_box(&group);
        let offending: Vec<&[f64]> = neg.iter().copied().filter(|x| inside(x, &lo, &hi)).collect();
        if acceptable(cfg.purity, group.len(), offending.len()) {
            finished.push(Hyperbox::new(lo, hi)?);
            continue;
        }
        let room = finished.len() + stack.len() + 2 <= cfg.max_boxes_per_class;
        let cut = if room { best_cut(&group, &offending) } else { None };
        match cut {
            Some(cut) => {
                let (left, right): (Vec<&[f64]>, Vec<&[f64]>) = group.iter().partition(|p| p[cut.dim] <= cut.threshold);
                stack.push(right);
                stack.push(left);
            }
            None => {
                impure.push(ImpureBox {
                    class_id,
                    box_index: finished.len(),
                    negatives_inside: offending.len(),
                });
                finished.push(Hyperbox::new(lo, hi)?);
            }
        }
    }
    Ok((finished, impure))
}

/// Trains every class independently with the greedy splitter.
pub fn train_greedy(ds: &Dataset, cfg: &GreedyConfig) -> Result<GreedyOutcome> {
    if cfg.max_boxes_per_class == 0 {
        return Err(Error::InvalidConfig("max boxes per class must be >= 1".into()));
    }
    if ds.n_classes() < 2 {
        return Err(Error::InvalidDataset("need at least 2 classes".into()));
    }
    let mut modules = Vec::with_capacity(ds.n_classes());
    let mut impure = Vec::new();
    for s in 1..=ds.n_classes() {
        let (boxes, warn) = train_class(ds, s, cfg)?;
        modules.push(ClassModule::new(s, boxes)?);
        impure.extend(warn);
    }
    Ok(GreedyOutcome {
        model: MpclModel::new(modules)?,
        impure,
    })
}
