//! Experiments on the lacunary Euler datum, their reports, and pass/fail checks.

pub mod checks;
pub mod emit;
pub mod error;
pub mod experiments;
pub mod report;
pub mod thresholds;

pub use error::{HarnessError, Result};
pub use report::{ExperimentReport, InflationRow, LemmaRow, RemainderRow, Row};
pub use thresholds::Thresholds;
