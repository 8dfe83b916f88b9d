//! Periodic grids, transforms, Fourier multipliers, spectral derivatives and
//! rectangle-rule `L^p` norms.

mod fft;
mod field;
mod grid;

use num_complex::Complex64;

pub use field::{Field, Representation, ScalarField, VectorField2};
pub(crate) use fft::{forward_1d, inverse_1d};
pub(crate) use field::check_p;
pub use grid::{make_grid, Grid2D};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `(d/dx1, d/dx2) f`, by multiplication with `i xi`.
pub fn gradient(f: &ScalarField) -> VectorField2 {
    VectorField2 {
        u1: f.apply_multiplier(|xi1, _| I * xi1),
        u2: f.apply_multiplier(|_, xi2| I * xi2),
    }
}

/// Perpendicular gradient `(-d/dx2, d/dx1) f`; divergence-free for any `f`.
pub fn perp_gradient(f: &ScalarField) -> VectorField2 {
    VectorField2 {
        u1: f.apply_multiplier(|_, xi2| -I * xi2),
        u2: f.apply_multiplier(|xi1, _| I * xi1),
    }
}

pub fn divergence(v: &VectorField2) -> ScalarField {
    let a = v.u1.apply_multiplier(|xi1, _| I * xi1);
    let b = v.u2.apply_multiplier(|_, xi2| I * xi2);
    a.add(&b)
}

/// Scalar vorticity `d1 u2 - d2 u1`.
pub fn curl(v: &VectorField2) -> ScalarField {
    let a = v.u2.apply_multiplier(|xi1, _| I * xi1);
    let b = v.u1.apply_multiplier(|_, xi2| I * xi2);
    a.sub(&b)
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    f.apply_real_multiplier(|xi1, xi2| -(xi1 * xi1 + xi2 * xi2))
}

/// `L^2` norm of the full gradient matrix of a vector field, `(sum_ij ||d_i u_j||^2)^{1/2}`.
pub fn gradient_l2(v: &VectorField2) -> f64 {
    let abs_xi = |xi1: f64, xi2: f64| xi1.hypot(xi2);
    v.multiplier_l2_norm(abs_xi)
}
