//! Error type shared by every module of the core crate.

use thiserror::Error;

use crate::spectral::Representation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A configuration value is outside its admissible range.
    #[error("invalid configuration `{field}`: {message}")]
    Config { field: &'static str, message: String },

    /// An operation was handed a field in the wrong representation.
    #[error("representation mismatch: expected {expected:?}, found {found:?}")]
    Representation {
        expected: Representation,
        found: Representation,
    },

    /// A block index (or similar) outside the range the grid supports.
    #[error("index {index} out of range [{min}, {max}] for {what}")]
    Range {
        what: &'static str,
        index: i64,
        min: i64,
        max: i64,
    },

    /// Two fields that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The advective CFL bound is violated.
    #[error("time step {dt:e} exceeds the CFL bound {bound:e}")]
    Cfl { dt: f64, bound: f64 },

    /// The solver produced a non-finite value.
    #[error("solution became non-finite at step {step} (t = {time:e})")]
    Diverged { step: usize, time: f64 },
}

impl Error {
    pub(crate) fn config(field: &'static str, message: impl Into<String>) -> Self {
        Error::Config {
            field,
            message: message.into(),
        }
    }
}
