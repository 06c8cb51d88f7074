pub mod baselines;
pub mod ccp;
pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod lp;
pub mod minimax;

pub use error::{Error, Result};
