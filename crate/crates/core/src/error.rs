use thiserror::Error;

use crate::solver::IterationTrace;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid exponent p = {0}: need p > 1")]
    InvalidExponent(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("I + KF is singular (det = {determinant:e}); the solution is not unique")]
    NonUniqueSolution { determinant: f64 },

    #[error("iteration diverged at step {step}: {reason}")]
    Diverged {
        step: usize,
        reason: String,
        trace: Box<IterationTrace>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
