//! Subgradient linearisation of `psi` and the index selections that drive it.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::minimax::Hyperbox;

/// One of the `2n` affine pieces of `psi`: either `a_i - x_i` or `x_i - b_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Facet {
    Lower(usize),
    Upper(usize),
}

impl Facet {
    /// Position in the stacked vector `[a - x, x - b]` (0-based).
    pub fn flat_index(self, n: usize) -> usize {
        match self {
            Facet::Lower(i) => i,
            Facet::Upper(i) => n + i,
        }
    }

    pub fn from_flat_index(index: usize, n: usize) -> Result<Self> {
        if index < n {
            Ok(Facet::Lower(index))
        } else if index < 2 * n {
            Ok(Facet::Upper(index - n))
        } else {
            Err(Error::InvalidConfig(format!(
                "facet index {index} out of range for dimension {n}"
            )))
        }
    }

    pub fn coordinate(self) -> usize {
        match self {
            Facet::Lower(i) | Facet::Upper(i) => i,
        }
    }
}

/// The active piece of `psi(x, box)`: the first maximiser of `[a - x, x - b]`.
pub fn select_istar(x: &[f64], hyperbox: &Hyperbox) -> Result<Facet> {
    check_dim(hyperbox.dim(), x.len())?;
    Ok(select_istar_unchecked(x, hyperbox))
}

pub(crate) fn select_istar_unchecked(x: &[f64], hyperbox: &Hyperbox) -> Facet {
    let (a, b) = (hyperbox.lower(), hyperbox.upper());
    let mut best = Facet::Lower(0);
    let mut best_val = f64::NEG_INFINITY;
    for (i, &xi) in x.iter().enumerate() {
        if a[i] - xi > best_val {
            best = Facet::Lower(i);
            best_val = a[i] - xi;
        }
    }
    for (i, &xi) in x.iter().enumerate() {
        if xi - b[i] > best_val {
            best = Facet::Upper(i);
            best_val = xi - b[i];
        }
    }
    best
}

/// Box index `k*` maximising `sum_{j != k} psi(x, box_j)` (0-based, lowest
/// index on ties). Equivalently the first box with the smallest `psi`.
pub fn select_kstar(x: &[f64], boxes: &[Hyperbox]) -> Result<usize> {
    if boxes.is_empty() {
        return Err(Error::InvalidConfig("need at least one box".into()));
    }
    for b in boxes {
        check_dim(b.dim(), x.len())?;
    }
    Ok(select_kstar_unchecked(x, boxes))
}

pub(crate) fn select_kstar_unchecked(x: &[f64], boxes: &[Hyperbox]) -> usize {
    let psis: Vec<f64> = boxes.iter().map(|b| b.psi_unchecked(x)).collect();
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for k in 0..psis.len() {
        let rest: f64 = psis.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, p)| p).sum();
        if rest > best_val {
            best = k;
            best_val = rest;
        }
    }
    best
}

/// Affine minorant of `psi(x, ·)` selected by `facet`, evaluated at `hyperbox`.
pub fn linearized_psi(x: &[f64], hyperbox: &Hyperbox, facet: Facet) -> Result<f64> {
    check_dim(hyperbox.dim(), x.len())?;
    let n = x.len();
    match facet {
        Facet::Lower(i) if i < n => Ok(hyperbox.lower()[i] - x[i]),
        Facet::Upper(i) if i < n => Ok(x[i] - hyperbox.upper()[i]),
        _ => Err(Error::InvalidConfig(format!(
            "facet {facet:?} out of range for dimension {n}"
        ))),
    }
}
