//! Dense linear programming in inequality form.
//!
//! ```text
//! minimize    c · v
//! subject to  A v <= b
//!             v_j >= lower_j   (for variables with a lower bound; others are free)
//! ```
//!
//! [`solve`] runs a two-phase primal simplex with Bland's rule on a
//! condensed (Tucker) tableau. Infeasible and unbounded programs are
//! reported through [`LpStatus`]; only malformed input and the pivot limit
//! are errors.

mod dump;
mod simplex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dump::{read_dump, write_dump};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("inconsistent shape: {0}")]
    Shape(String),
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("pivot limit of {0} exceeded")]
    PivotLimit(usize),
    #[error("malformed dump at line {line}: {message}")]
    Dump { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    c: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
    var_lower: Vec<Option<f64>>,
}

impl LpProblem {
    /// `a` is the row-major `b.len() x c.len()` constraint matrix.
    pub fn new(c: Vec<f64>, a: Vec<f64>, b: Vec<f64>, var_lower: Vec<Option<f64>>) -> Result<Self, LpError> {
        let v = c.len();
        if a.len() != b.len() * v {
            return Err(LpError::Shape(format!(
                "constraint matrix has {} entries, expected {} x {}",
                a.len(),
                b.len(),
                v
            )));
        }
        if var_lower.len() != v {
            return Err(LpError::Shape(format!(
                "{} variable bounds for {} variables",
                var_lower.len(),
                v
            )));
        }
        if !c.iter().all(|x| x.is_finite()) {
            return Err(LpError::NonFinite("objective"));
        }
        if !a.iter().all(|x| x.is_finite()) {
            return Err(LpError::NonFinite("constraint matrix"));
        }
        if !b.iter().all(|x| x.is_finite()) {
            return Err(LpError::NonFinite("right-hand side"));
        }
        if !var_lower.iter().flatten().all(|x| x.is_finite()) {
            return Err(LpError::NonFinite("variable bounds"));
        }
        Ok(LpProblem { c, a, b, var_lower })
    }

    pub fn n_vars(&self) -> usize {
        self.c.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.b.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.c
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let v = self.n_vars();
        &self.a[i * v..(i + 1) * v]
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn var_lower(&self) -> &[Option<f64>] {
        &self.var_lower
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// Largest violation of any constraint or bound at `x`; `<= 0` when feasible.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = (0..self.n_constraints()).map(|i| {
            let lhs: f64 = self.row(i).iter().zip(x).map(|(a, x)| a * x).sum();
            lhs - self.b[i]
        });
        let bounds = self.var_lower.iter().zip(x).filter_map(|(l, x)| l.map(|l| l - x));
        rows.chain(bounds).fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Option<Vec<f64>>,
    pub objective: Option<f64>,
    /// Pivots performed across both phases.
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LpOptions {
    pub feas_tol: f64,
    pub max_pivots: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            feas_tol: 1e-7,
            max_pivots: 5_000_000,
        }
    }
}

pub fn solve(problem: &LpProblem, opts: &LpOptions) -> Result<LpSolution, LpError> {
    simplex::solve(problem, opts)
}

/// Primal feasibility within `tol` and a stored objective equal to `c · x`
/// within `tol`. Non-optimal solutions are never accepted.
pub fn check_solution(problem: &LpProblem, solution: &LpSolution, tol: f64) -> bool {
    let (Some(x), Some(obj)) = (&solution.x, solution.objective) else {
        return false;
    };
    solution.status == LpStatus::Optimal
        && x.len() == problem.n_vars()
        && problem.max_violation(x) <= tol
        && (problem.evaluate(x) - obj).abs() <= tol
}
