use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid hyperbox: lower[{index}] = {lower} exceeds upper[{index}] = {upper}")]
    InvertedBox { index: usize, lower: f64, upper: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("class {0} has no samples")]
    EmptyClass(usize),

    #[error("linear program: {0}")]
    Lp(#[from] crate::lp::LpError),

    #[error("linear subproblem for class {class} was {status:?}")]
    SubproblemStatus { class: usize, status: crate::lp::LpStatus },

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse { row: usize, column: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("experiment spec: {0}")]
    Spec(String),

    #[error("unsupported dimension: {found} features (only {supported} supported)")]
    UnsupportedDimension { found: usize, supported: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
