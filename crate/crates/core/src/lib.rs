//! Numerical laboratory for Littlewood-Paley analysis, Besov norms and the
//! incompressible Euler equations on the two-dimensional torus.

pub mod construction;
pub mod error;
pub mod euler;
pub mod littlewood_paley;
pub mod spectral;

pub use error::{Error, Result};
