//! Gradient baseline: each class module is fitted as a binary logit model
//! with Adam, using subgradients of the max/min chain.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ccp::{kmeanspp_init, stream_seed, ClassProblem};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::minimax::{ClassModule, Hyperbox, MpclModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_hat: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 0.001,
            epochs: 100,
            beta1: 0.9,
            beta2: 0.999,
            eps_hat: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning rate must be > 0".into()));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::InvalidConfig("Adam betas must lie in [0, 1)".into()));
        }
        if !(self.eps_hat > 0.0) {
            return Err(Error::InvalidConfig("Adam epsilon must be > 0".into()));
        }
        Ok(())
    }
}

/// Box parameters flattened as `[a^1, b^1, a^2, b^2, ...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxParams {
    pub n: usize,
    pub values: Vec<f64>,
}

impl BoxParams {
    pub fn from_boxes(boxes: &[Hyperbox]) -> Self {
        let n = boxes[0].dim();
        let values = boxes
            .iter()
            .flat_map(|b| b.lower().iter().chain(b.upper()).copied())
            .collect();
        BoxParams { n, values }
    }

    pub fn n_boxes(&self) -> usize {
        self.values.len() / (2 * self.n)
    }

    fn lower(&self, k: usize) -> &[f64] {
        &self.values[2 * k * self.n..(2 * k + 1) * self.n]
    }

    fn upper(&self, k: usize) -> &[f64] {
        &self.values[(2 * k + 1) * self.n..(2 * k + 2) * self.n]
    }

    /// Swaps coordinates where `a_i > b_i` so the boxes stay valid.
    pub fn repair(&mut self) {
        let n = self.n;
        for k in 0..self.n_boxes() {
            for i in 0..n {
                let (ia, ib) = (2 * k * n + i, (2 * k + 1) * n + i);
                if self.values[ia] > self.values[ib] {
                    self.values.swap(ia, ib);
                }
            }
        }
    }

    pub fn to_boxes(&self) -> Result<Vec<Hyperbox>> {
        (0..self.n_boxes())
            .map(|k| Hyperbox::new(self.lower(k).to_vec(), self.upper(k).to_vec()))
            .collect()
    }

    /// Module output at `x` with the index of the active parameter and the
    /// sign of its partial derivative (lowest index wins every tie).
    fn logit(&self, x: &[f64]) -> (f64, usize, f64) {
        let n = self.n;
        let mut best = (f64::NEG_INFINITY, 0, 0.0);
        for k in 0..self.n_boxes() {
            let (a, b) = (self.lower(k), self.upper(k));
            let mut h = (f64::INFINITY, 0, 0.0);
            for i in 0..n {
                if x[i] - a[i] < h.0 {
                    h = (x[i] - a[i], 2 * k * n + i, -1.0);
                }
            }
            for i in 0..n {
                if b[i] - x[i] < h.0 {
                    h = (b[i] - x[i], (2 * k + 1) * n + i, 1.0);
                }
            }
            if h.0 > best.0 {
                best = h;
            }
        }
        best
    }
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean binary cross-entropy on logits: targets are 1 for positives and 0
/// for negatives.
pub fn bce_loss(cp: &ClassProblem, params: &BoxParams) -> f64 {
    let m = (cp.n_positives() + cp.n_negatives()) as f64;
    let pos: f64 = cp
        .positive_rows()
        .map(|x| softplus(params.logit(x).0) - params.logit(x).0)
        .sum();
    let neg: f64 = cp.negative_rows().map(|x| softplus(params.logit(x).0)).sum();
    (pos + neg) / m
}

/// Loss and its subgradient with respect to every box coordinate.
pub fn bce_loss_grad(cp: &ClassProblem, params: &BoxParams) -> (f64, Vec<f64>) {
    let m = (cp.n_positives() + cp.n_negatives()) as f64;
    let mut grad = vec![0.0; params.values.len()];
    let mut loss = 0.0;
    let samples = cp
        .positive_rows()
        .map(|x| (x, 1.0))
        .chain(cp.negative_rows().map(|x| (x, 0.0)));
    for (x, target) in samples {
        let (z, idx, sign) = params.logit(x);
        loss += softplus(z) - target * z;
        grad[idx] += (sigmoid(z) - target) * sign / m;
    }
    (loss / m, grad)
}

#[derive(Debug, Clone)]
struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl AdamState {
    fn new(len: usize) -> Self {
        AdamState {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    /// Applies one bias-corrected Adam update in place.
    fn step(&mut self, cfg: &AdamConfig, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - cfg.beta1.powi(self.t);
        let c2 = 1.0 - cfg.beta2.powi(self.t);
        for (j, (p, g)) in params.iter_mut().zip(grad).enumerate() {
            self.m[j] = cfg.beta1 * self.m[j] + (1.0 - cfg.beta1) * g;
            self.v[j] = cfg.beta2 * self.v[j] + (1.0 - cfg.beta2) * g * g;
            let m_hat = self.m[j] / c1;
            let v_hat = self.v[j] / c2;
            *p -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.eps_hat);
        }
    }
}

/// Per-epoch record of one class's Adam run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamTrace {
    pub class_id: usize,
    pub losses: Vec<f64>,
    /// Largest absolute coordinate change produced by any Adam step.
    pub max_step: f64,
}

/// Full-batch Adam from explicit starting boxes.
pub fn train_adam_class_from(
    cp: &ClassProblem,
    init: &[Hyperbox],
    cfg: &AdamConfig,
) -> Result<(Vec<Hyperbox>, AdamTrace)> {
    cfg.validate()?;
    let mut params = BoxParams::from_boxes(init);
    let mut state = AdamState::new(params.values.len());
    let mut trace = AdamTrace {
        class_id: cp.class_id,
        losses: Vec::with_capacity(cfg.epochs),
        max_step: 0.0,
    };
    for _ in 0..cfg.epochs {
        let (loss, grad) = bce_loss_grad(cp, &params);
        trace.losses.push(loss);
        let before = params.values.clone();
        state.step(cfg, &mut params.values, &grad);
        let step = before
            .iter()
            .zip(&params.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        trace.max_step = trace.max_step.max(step);
        params.repair();
    }
    Ok((params.to_boxes()?, trace))
}

/// One-against-all Adam training from k-means++ boxes.
pub fn train_adam(
    ds: &Dataset,
    cfg: &AdamConfig,
    boxes_per_class: usize,
    seed: u64,
) -> Result<(MpclModel, Vec<AdamTrace>)> {
    cfg.validate()?;
    if boxes_per_class == 0 {
        return Err(Error::InvalidConfig("boxes per class must be >= 1".into()));
    }
    if ds.n_classes() < 2 {
        return Err(Error::InvalidDataset("need at least 2 classes".into()));
    }
    let mut modules = Vec::with_capacity(ds.n_classes());
    let mut traces = Vec::with_capacity(ds.n_classes());
    for s in 1..=ds.n_classes() {
        let cp = ClassProblem::from_dataset(ds, s)?;
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, s as u64));
        let init = kmeanspp_init(&cp.positives, cp.n_features, boxes_per_class, &mut rng)?;
        let (boxes, trace) = train_adam_class_from(&cp, &init, cfg)?;
        modules.push(ClassModule::new(s, boxes)?);
        traces.push(trace);
    }
    Ok((MpclModel::new(modules)?, traces))
}
