//! Max-plus arithmetic of the morphological perceptron with a competitive layer.
//!
//! A hyperbox `[a, b]` is represented by a block of two morphological neurons
//! (an erosion and an anti-dilation). Its activation at `x` is
//!
//! ```text
//! h(x) = min_i (x_i - a_i)  ∧  min_i (b_i - x_i)
//! ```
//!
//! which is non-negative exactly when `a <= x <= b`. The negation
//! `psi = -h` is convex in the box parameters and is the building block of
//! the difference-of-convex decomposition used by the trainer:
//! `module_output = dc_f - dc_g`.
//!
//! Every maximum in this module resolves ties to the lowest index.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Axis-aligned box `[lower, upper]` in feature space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHyperbox", into = "RawHyperbox")]
pub struct Hyperbox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawHyperbox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl TryFrom<RawHyperbox> for Hyperbox {
    type Error = Error;

    fn try_from(raw: RawHyperbox) -> Result<Self> {
        Hyperbox::new(raw.lower, raw.upper)
    }
}

impl From<Hyperbox> for RawHyperbox {
    fn from(b: Hyperbox) -> Self {
        RawHyperbox {
            lower: b.lower,
            upper: b.upper,
        }
    }
}

impl Hyperbox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidModel("hyperbox must have dimension >= 1".into()));
        }
        check_dim(lower.len(), upper.len())?;
        if lower.iter().chain(&upper).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("hyperbox coordinates"));
        }
        if let Some(index) = (0..lower.len()).find(|&i| lower[i] > upper[i]) {
            return Err(Error::InvertedBox {
                index,
                lower: lower[index],
                upper: upper[index],
            });
        }
        Ok(Hyperbox { lower, upper })
    }

    /// Degenerate box `[c, c]`.
    pub fn point(center: Vec<f64>) -> Result<Self> {
        Hyperbox::new(center.clone(), center)
    }

    /// Builds a box from solver output, collapsing coordinates where `lower`
    /// exceeds `upper` by round-off onto their midpoint.
    pub(crate) fn from_solver(mut lower: Vec<f64>, mut upper: Vec<f64>) -> Self {
        for (a, b) in lower.iter_mut().zip(upper.iter_mut()) {
            if *a > *b {
                let mid = 0.5 * (*a + *b);
                *a = mid;
                *b = mid;
            }
        }
        Hyperbox { lower, upper }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Sum of edge lengths, the quantity penalised by the regulariser.
    pub fn size(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(xi, (a, b))| a <= xi && xi <= b)
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.lower, self.upper)
    }

    pub(crate) fn psi_unchecked(&self, x: &[f64]) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for (i, &xi) in x.iter().enumerate() {
            m = m.max(self.lower[i] - xi).max(xi - self.upper[i]);
        }
        m
    }
}

/// One class module: a union of hyperboxes voting for `class_id`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassModule {
    class_id: usize,
    boxes: Vec<Hyperbox>,
}

impl ClassModule {
    pub fn new(class_id: usize, boxes: Vec<Hyperbox>) -> Result<Self> {
        let first = boxes
            .first()
            .ok_or_else(|| Error::InvalidModel(format!("class {class_id} has no hyperboxes")))?;
        let n = first.dim();
        for b in &boxes {
            check_dim(n, b.dim())?;
        }
        Ok(ClassModule { class_id, boxes })
    }

    pub fn class_id(&self) -> usize {
        self.class_id
    }

    pub fn boxes(&self) -> &[Hyperbox] {
        &self.boxes
    }

    pub fn dim(&self) -> usize {
        self.boxes[0].dim()
    }

    pub(crate) fn output_unchecked(&self, x: &[f64]) -> f64 {
        self.boxes
            .iter()
            .map(|b| -b.psi_unchecked(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Full classifier: `S >= 2` class modules followed by winner-take-all.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpclModel {
    modules: Vec<ClassModule>,
    n_features: usize,
}

impl MpclModel {
    pub fn new(modules: Vec<ClassModule>) -> Result<Self> {
        if modules.len() < 2 {
            return Err(Error::InvalidModel(format!(
                "need at least 2 class modules, got {}",
                modules.len()
            )));
        }
        let n_features = modules[0].dim();
        for (i, m) in modules.iter().enumerate() {
            if m.class_id != i + 1 {
                return Err(Error::InvalidModel(format!(
                    "module {} carries class id {}, expected {}",
                    i,
                    m.class_id,
                    i + 1
                )));
            }
            check_dim(n_features, m.dim())?;
        }
        Ok(MpclModel { modules, n_features })
    }

    pub fn modules(&self) -> &[ClassModule] {
        &self.modules
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.modules.len()
    }

    /// Total number of hyperboxes across all classes.
    pub fn box_count(&self) -> usize {
        self.modules.iter().map(|m| m.boxes.len()).sum()
    }
}

/// `max_i (a_i - x_i) ∨ max_i (x_i - b_i)`, convex in the box parameters.
pub fn psi(x: &[f64], hyperbox: &Hyperbox) -> Result<f64> {
    check_dim(hyperbox.dim(), x.len())?;
    Ok(hyperbox.psi_unchecked(x))
}

/// Block activation `min_i (x_i - a_i) ∧ min_i (b_i - x_i)`.
pub fn block_output(x: &[f64], hyperbox: &Hyperbox) -> Result<f64> {
    check_dim(hyperbox.dim(), x.len())?;
    let mut m = f64::INFINITY;
    for (i, &xi) in x.iter().enumerate() {
        m = m.min(xi - hyperbox.lower[i]).min(hyperbox.upper[i] - xi);
    }
    Ok(m)
}

/// Maximum block activation over the module's boxes.
pub fn module_output(x: &[f64], module: &ClassModule) -> Result<f64> {
    check_dim(module.dim(), x.len())?;
    Ok(module.output_unchecked(x))
}

fn psi_values(x: &[f64], module: &ClassModule) -> Result<Vec<f64>> {
    check_dim(module.dim(), x.len())?;
    Ok(module.boxes.iter().map(|b| b.psi_unchecked(x)).collect())
}

/// Convex part `f = max_k sum_{j != k} psi_j`.
pub fn dc_f(x: &[f64], module: &ClassModule) -> Result<f64> {
    let psis = psi_values(x, module)?;
    Ok(dc_f_from_psis(&psis))
}

/// Convex part `g = sum_k psi_k`.
pub fn dc_g(x: &[f64], module: &ClassModule) -> Result<f64> {
    Ok(psi_values(x, module)?.iter().sum())
}

fn dc_f_from_psis(psis: &[f64]) -> f64 {
    (0..psis.len())
        .map(|k| {
            psis.iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, p)| p)
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Winner-take-all label (1-based); ties go to the lowest class.
pub fn classify(x: &[f64], model: &MpclModel) -> Result<usize> {
    check_dim(model.n_features, x.len())?;
    Ok(classify_unchecked(x, model))
}

pub(crate) fn classify_unchecked(x: &[f64], model: &MpclModel) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (s, m) in model.modules.iter().enumerate() {
        let y = m.output_unchecked(x);
        if y > best_val {
            best = s;
            best_val = y;
        }
    }
    model.modules[best].class_id
}

/// Row-wise [`classify`] over a row-major `rows x n_features` matrix.
pub fn predict_batch(rows: &[f64], model: &MpclModel) -> Result<Vec<usize>> {
    let n = model.n_features;
    if rows.len() % n != 0 {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rows.len() % n,
        });
    }
    Ok(rows.chunks_exact(n).map(|x| classify_unchecked(x, model)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hb(a: &[f64], b: &[f64]) -> Hyperbox {
        Hyperbox::new(a.to_vec(), b.to_vec()).unwrap()
    }

    fn two_box_module() -> ClassModule {
        ClassModule::new(1, vec![hb(&[0., 0.], &[1., 1.]), hb(&[3., 3.], &[4., 4.])]).unwrap()
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi(&[0., 0.], &hb(&[0., 0.], &[0., 0.])).unwrap(), 0.0);
        assert_eq!(psi(&[1., 2.], &hb(&[0., 0.], &[3., 3.])).unwrap(), -1.0);
        assert_eq!(psi(&[5., 0.], &hb(&[0., 0.], &[3., 3.])).unwrap(), 2.0);
    }

    #[test]
    fn block_output_examples() {
        assert_eq!(block_output(&[1., 1.], &hb(&[0., 0.], &[2., 2.])).unwrap(), 1.0);
        assert_eq!(block_output(&[0., 0.], &hb(&[0., 0.], &[0., 0.])).unwrap(), 0.0);
    }

    #[test]
    fn module_output_examples() {
        let m = two_box_module();
        assert_eq!(module_output(&[3.5, 3.5], &m).unwrap(), 0.5);
        assert_eq!(module_output(&[2., 2.], &m).unwrap(), -1.0);
        let single = ClassModule::new(1, vec![hb(&[0., 0.], &[2., 2.])]).unwrap();
        assert_eq!(module_output(&[1., 1.], &single).unwrap(), 1.0);
    }

    #[test]
    fn dc_parts_examples() {
        let m = two_box_module();
        let x = [3.5, 3.5];
        assert_eq!(dc_g(&x, &m).unwrap(), 2.0);
        assert_eq!(dc_f(&x, &m).unwrap(), 2.5);

        let single = ClassModule::new(1, vec![hb(&[0., 0.], &[3., 3.])]).unwrap();
        let x = [1., 2.];
        assert_eq!(dc_f(&x, &single).unwrap(), 0.0);
        assert_eq!(dc_g(&x, &single).unwrap(), -1.0);
        assert_eq!(
            dc_f(&x, &single).unwrap() - dc_g(&x, &single).unwrap(),
            module_output(&x, &single).unwrap()
        );
    }

    #[test]
    fn classify_examples() {
        let near = ClassModule::new(1, vec![hb(&[0., 0.], &[1., 1.])]).unwrap();
        let far = ClassModule::new(2, vec![hb(&[10., 10.], &[11., 11.])]).unwrap();
        let model = MpclModel::new(vec![near.clone(), far]).unwrap();
        assert_eq!(classify(&[0.5, 0.5], &model).unwrap(), 1);

        let twin = ClassModule::new(2, near.boxes().to_vec()).unwrap();
        let tied = MpclModel::new(vec![near, twin]).unwrap();
        assert_eq!(classify(&[0.5, 0.5], &tied).unwrap(), 1);
        assert_eq!(classify(&[-7.0, 2.0], &tied).unwrap(), 1);
    }

    #[test]
    fn predict_batch_edges() {
        let model = MpclModel::new(vec![
            ClassModule::new(1, vec![hb(&[0.], &[1.])]).unwrap(),
            ClassModule::new(2, vec![hb(&[5.], &[6.])]).unwrap(),
        ])
        .unwrap();
        assert!(predict_batch(&[], &model).unwrap().is_empty());
        assert_eq!(predict_batch(&[5.5], &model).unwrap(), vec![2]);
    }

    #[test]
    fn dimension_errors() {
        let b = hb(&[0., 0.], &[1., 1.]);
        assert!(matches!(
            psi(&[0.], &b),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
        assert!(block_output(&[0., 0., 0.], &b).is_err());
        assert!(module_output(&[0.], &two_box_module()).is_err());
    }

    #[test]
    fn construction_rejects_bad_boxes() {
        assert!(matches!(
            Hyperbox::new(vec![1.0], vec![0.0]),
            Err(Error::InvertedBox { index: 0, .. })
        ));
        assert!(Hyperbox::new(vec![f64::NAN], vec![0.0]).is_err());
        assert!(Hyperbox::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(Hyperbox::new(vec![], vec![]).is_err());
        assert!(ClassModule::new(1, vec![]).is_err());
        let m = two_box_module();
        assert!(MpclModel::new(vec![m.clone()]).is_err());
        assert!(MpclModel::new(vec![m.clone(), m]).is_err());
    }

    #[test]
    fn solver_repair_collapses_inversions() {
        let b = Hyperbox::from_solver(vec![1.0 + 1e-12, 0.0], vec![1.0, 2.0]);
        assert!(b.lower()[0] <= b.upper()[0]);
        assert_eq!(b.upper()[1], 2.0);
    }
}
