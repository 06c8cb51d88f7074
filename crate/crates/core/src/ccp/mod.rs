//! Convex-concave procedure (CCP) training of MPCL class modules.
//!
//! Each class is trained one-against-all. For class `s` the non-convex
//! problem
//!
//! ```text
//! minimize   sum_l xi_l + gamma * sum_{k,i} (b^k_i - a^k_i)
//! subject to max_k h_k(x_l) <= xi_l   for negatives
//!            max_k h_k(x_l) >= -xi_l  for positives
//!            a <= b, xi >= 0
//! ```
//!
//! is attacked by repeatedly linearising its concave parts at the current
//! boxes, which turns every step into a linear program:
//!
//! * a negative sample must leave every box through the facet that is
//!   currently most violated ([`select_istar`]);
//! * a positive sample must lie inside the box it currently fits best
//!   ([`select_kstar`]), which is expressed exactly by `2n` rows.
//!
//! Boxes start as points on the k-means++/Lloyd centroids of the positives.
//! The previous iterate stays feasible for the next program, so the
//! per-iteration objective never increases.

mod kmeans;
mod linearize;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{check_dim, Error, Result};
use crate::lp::{self, LpOptions, LpProblem, LpStatus};
use crate::minimax::{ClassModule, Hyperbox, MpclModel};

pub use kmeans::{kmeans, kmeanspp_init};
pub use linearize::{linearized_psi, select_istar, select_kstar, Facet};
use linearize::{select_istar_unchecked, select_kstar_unchecked};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub boxes_per_class: usize,
    pub gamma: f64,
    pub max_outer_iters: usize,
    /// Stop once `|obj_t - obj_{t-1}| <= objective_tol * |obj_{t-1}|`.
    pub objective_tol: f64,
    pub seed: u64,
    /// Required depth of exclusion/inclusion; zero reproduces the soft
    /// constraints exactly.
    pub margin: f64,
    pub lp: LpOptions,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            boxes_per_class: 4,
            gamma: 0.01,
            max_outer_iters: 50,
            objective_tol: 1e-4,
            seed: 0,
            margin: 0.0,
            lp: LpOptions::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.boxes_per_class == 0 {
            return Err(Error::InvalidConfig("boxes per class must be >= 1".into()));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "gamma must be finite and >= 0, got {}",
                self.gamma
            )));
        }
        if self.max_outer_iters == 0 {
            return Err(Error::InvalidConfig("max_outer_iters must be >= 1".into()));
        }
        if !(self.objective_tol > 0.0) {
            return Err(Error::InvalidConfig("objective_tol must be > 0".into()));
        }
        if !(self.margin >= 0.0 && self.margin.is_finite()) {
            return Err(Error::InvalidConfig("margin must be finite and >= 0".into()));
        }
        Ok(())
    }
}

/// One-against-all view of a dataset for a single class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassProblem {
    pub class_id: usize,
    pub n_features: usize,
    /// Row-major samples of the class.
    pub positives: Vec<f64>,
    /// Row-major samples of every other class, in dataset order.
    pub negatives: Vec<f64>,
}

impl ClassProblem {
    pub fn new(class_id: usize, n_features: usize, positives: Vec<f64>, negatives: Vec<f64>) -> Result<Self> {
        if n_features == 0 || positives.len() % n_features != 0 || negatives.len() % n_features != 0 {
            return Err(Error::InvalidDataset(format!(
                "sample buffers are not multiples of dimension {n_features}"
            )));
        }
        if positives.is_empty() {
            return Err(Error::EmptyClass(class_id));
        }
        if positives.iter().chain(&negatives).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("class problem samples"));
        }
        Ok(ClassProblem {
            class_id,
            n_features,
            positives,
            negatives,
        })
    }

    pub fn from_dataset(ds: &Dataset, class_id: usize) -> Result<Self> {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (row, &label) in ds.rows().zip(ds.labels()) {
            if label == class_id {
                pos.extend_from_slice(row);
            } else {
                neg.extend_from_slice(row);
            }
        }
        ClassProblem::new(class_id, ds.n_features(), pos, neg)
    }

    pub fn n_positives(&self) -> usize {
        self.positives.len() / self.n_features
    }

    pub fn n_negatives(&self) -> usize {
        self.negatives.len() / self.n_features
    }

    pub fn positive_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.positives.chunks_exact(self.n_features)
    }

    pub fn negative_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.negatives.chunks_exact(self.n_features)
    }
}

/// Variable layout of a class subproblem:
/// `[a^1 .. a^K, b^1 .. b^K, xi_1 .. xi_M]`, with the slacks of positives
/// preceding those of negatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubproblemLayout {
    pub n: usize,
    pub boxes: usize,
    pub positives: usize,
    pub negatives: usize,
}

impl SubproblemLayout {
    pub fn new(cp: &ClassProblem, boxes: usize) -> Self {
        SubproblemLayout {
            n: cp.n_features,
            boxes,
            positives: cp.n_positives(),
            negatives: cp.n_negatives(),
        }
    }

    pub fn lower(&self, k: usize, i: usize) -> usize {
        k * self.n + i
    }

    pub fn upper(&self, k: usize, i: usize) -> usize {
        (self.boxes + k) * self.n + i
    }

    pub fn slack(&self, l: usize) -> usize {
        2 * self.boxes * self.n + l
    }

    pub fn n_vars(&self) -> usize {
        2 * self.boxes * self.n + self.positives + self.negatives
    }

    pub fn n_rows(&self) -> usize {
        self.negatives * self.boxes + self.positives * 2 * self.n + self.n * self.boxes
    }

    pub fn pack(&self, boxes: &[Hyperbox], slacks: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.n_vars()];
        for (k, b) in boxes.iter().enumerate() {
            for i in 0..self.n {
                v[self.lower(k, i)] = b.lower()[i];
                v[self.upper(k, i)] = b.upper()[i];
            }
        }
        for (l, &xi) in slacks.iter().enumerate() {
            v[self.slack(l)] = xi;
        }
        v
    }

    /// Boxes and slacks from a solver point; round-off inversions of `a <= b`
    /// are collapsed.
    pub fn unpack(&self, v: &[f64]) -> (Vec<Hyperbox>, Vec<f64>) {
        let boxes = (0..self.boxes)
            .map(|k| {
                let lower = (0..self.n).map(|i| v[self.lower(k, i)]).collect();
                let upper = (0..self.n).map(|i| v[self.upper(k, i)]).collect();
                Hyperbox::from_solver(lower, upper)
            })
            .collect();
        let slacks = v[self.slack(0)..].to_vec();
        (boxes, slacks)
    }
}

/// Builds the linear program of one CCP step at the current boxes `params`.
///
/// Rows, in order:
/// 1. every negative `l` and box `k`: the linearised exclusion through
///    facet `i*`, `-a_i - xi_l <= -x_i - margin` or `b_i - xi_l <= x_i - margin`;
/// 2. every positive `l`: `a^{k*}_i - xi_l <= x_i - margin` and
///    `-b^{k*}_i - xi_l <= -x_i - margin` for all `i`;
/// 3. `a^k_i - b^k_i <= 0`.
///
/// Box coordinates are free and slacks bounded below by zero.
pub fn assemble_subproblem(cp: &ClassProblem, params: &[Hyperbox], cfg: &TrainConfig) -> Result<LpProblem> {
    if params.is_empty() {
        return Err(Error::InvalidConfig("need at least one box".into()));
    }
    for b in params {
        check_dim(cp.n_features, b.dim())?;
    }
    let layout = SubproblemLayout::new(cp, params.len());
    let (n, nv) = (layout.n, layout.n_vars());
    let eps = cfg.margin;

    let mut c = vec![0.0; nv];
    for k in 0..layout.boxes {
        for i in 0..n {
            c[layout.lower(k, i)] = -cfg.gamma;
            c[layout.upper(k, i)] = cfg.gamma;
        }
    }
    for l in 0..layout.positives + layout.negatives {
        c[layout.slack(l)] = 1.0;
    }

    let rows = layout.n_rows();
    let mut a = vec![0.0; rows * nv];
    let mut rhs = Vec::with_capacity(rows);
    let mut r = 0;
    let mut row = |entries: &[(usize, f64)], bound: f64| {
        for &(j, v) in entries {
            a[r * nv + j] = v;
        }
        rhs.push(bound);
        r += 1;
    };

    for (q, x) in cp.negative_rows().enumerate() {
        let xi = layout.slack(layout.positives + q);
        for (k, b) in params.iter().enumerate() {
            match select_istar_unchecked(x, b) {
                Facet::Lower(i) => row(&[(layout.lower(k, i), -1.0), (xi, -1.0)], -x[i] - eps),
                Facet::Upper(i) => row(&[(layout.upper(k, i), 1.0), (xi, -1.0)], x[i] - eps),
            }
        }
    }
    for (p, x) in cp.positive_rows().enumerate() {
        let xi = layout.slack(p);
        let k = select_kstar_unchecked(x, params);
        for i in 0..n {
            row(&[(layout.lower(k, i), 1.0), (xi, -1.0)], x[i] - eps);
        }
        for i in 0..n {
            row(&[(layout.upper(k, i), -1.0), (xi, -1.0)], -x[i] - eps);
        }
    }
    for k in 0..layout.boxes {
        for i in 0..n {
            row(&[(layout.lower(k, i), 1.0), (layout.upper(k, i), -1.0)], 0.0);
        }
    }

    let mut lower = vec![None; nv];
    for l in 0..layout.positives + layout.negatives {
        lower[layout.slack(l)] = Some(0.0);
    }
    Ok(LpProblem::new(c, a, rhs, lower)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcpIteration {
    /// 1-based outer iteration.
    pub iteration: usize,
    pub objective: f64,
    pub pivots: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcpTrace {
    pub class_id: usize,
    pub iterations: Vec<CcpIteration>,
    /// Whether the objective tolerance (rather than the iteration cap) ended the loop.
    pub converged: bool,
}

impl CcpTrace {
    pub fn objectives(&self) -> Vec<f64> {
        self.iterations.iter().map(|it| it.objective).collect()
    }

    pub fn final_objective(&self) -> Option<f64> {
        self.iterations.last().map(|it| it.objective)
    }

    pub fn total_seconds(&self) -> f64 {
        self.iterations.iter().map(|it| it.seconds).sum()
    }
}

/// Seed of an independent random stream derived from `seed` (splitmix64).
pub(crate) fn stream_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs CCP for one class from a k-means++ start.
pub fn train_class(cp: &ClassProblem, cfg: &TrainConfig) -> Result<(Vec<Hyperbox>, CcpTrace)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, cp.class_id as u64));
    let init = kmeanspp_init(&cp.positives, cp.n_features, cfg.boxes_per_class, &mut rng)?;
    train_class_from(cp, init, cfg)
}

/// Runs CCP for one class from explicit starting boxes.
pub fn train_class_from(
    cp: &ClassProblem,
    init: Vec<Hyperbox>,
    cfg: &TrainConfig,
) -> Result<(Vec<Hyperbox>, CcpTrace)> {
    cfg.validate()?;
    let layout = SubproblemLayout::new(cp, init.len());
    let mut params = init;
    let mut trace = CcpTrace {
        class_id: cp.class_id,
        iterations: Vec::new(),
        converged: false,
    };
    let mut previous: Option<f64> = None;

    for t in 1..=cfg.max_outer_iters {
        let started = Instant::now();
        let problem = assemble_subproblem(cp, &params, cfg)?;
        let solution = lp::solve(&problem, &cfg.lp)?;
        match solution.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => {
                return Err(Error::SubproblemStatus {
                    class: cp.class_id,
                    status: LpStatus::Infeasible,
                })
            }
            LpStatus::Unbounded => {
                return Err(Error::InvalidConfig(format!(
                    "subproblem for class {} is unbounded; check gamma",
                    cp.class_id
                )))
            }
        }
        let x = solution.x.as_deref().expect("optimal solutions carry a point");
        let objective = solution.objective.expect("optimal solutions carry an objective");
        params = layout.unpack(x).0;
        trace.iterations.push(CcpIteration {
            iteration: t,
            objective,
            pivots: solution.iterations,
            seconds: started.elapsed().as_secs_f64(),
        });
        if let Some(prev) = previous {
            if (prev - objective).abs() <= cfg.objective_tol * prev.abs() {
                trace.converged = true;
                break;
            }
        }
        previous = Some(objective);
    }
    Ok((params, trace))
}

/// One-against-all CCP training of every class; classes train in parallel.
pub fn train(ds: &Dataset, cfg: &TrainConfig) -> Result<(MpclModel, Vec<CcpTrace>)> {
    cfg.validate()?;
    if ds.n_classes() < 2 {
        return Err(Error::InvalidDataset(format!(
            "need at least 2 classes, found {}",
            ds.n_classes()
        )));
    }
    if let Some(s) = ds.class_counts().iter().position(|&c| c == 0) {
        return Err(Error::EmptyClass(s + 1));
    }
    let results: Vec<(Vec<Hyperbox>, CcpTrace)> = (1..=ds.n_classes())
        .into_par_iter()
        .map(|s| train_class(&ClassProblem::from_dataset(ds, s)?, cfg))
        .collect::<Result<_>>()?;
    let mut modules = Vec::with_capacity(results.len());
    let mut traces = Vec::with_capacity(results.len());
    for (s, (boxes, trace)) in results.into_iter().enumerate() {
        modules.push(ClassModule::new(s + 1, boxes)?);
        traces.push(trace);
    }
    Ok((MpclModel::new(modules)?, traces))
}
