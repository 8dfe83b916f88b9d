#![allow(dead_code)]

use besov_core::spectral::{perp_gradient, Grid2D, ScalarField, VectorField2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Real field with random samples (all modes, including Nyquist).
pub fn random_field(grid: Grid2D, seed: u64) -> ScalarField {
    let mut r = rng(seed);
    let values = (0..grid.len()).map(|_| r.gen_range(-1.0..1.0)).collect();
    ScalarField::from_physical(grid, values).unwrap()
}

/// Real trigonometric polynomial with wavenumbers `|k_i| <= kmax`.
pub fn random_band_limited(grid: Grid2D, kmax: i64, seed: u64) -> ScalarField {
    let mut r = rng(seed);
    let n = grid.n() as i64;
    let mut coef = vec![Complex64::default(); grid.len()];
    let idx = |k1: i64, k2: i64| (k2.rem_euclid(n) * n + k1.rem_euclid(n)) as usize;
    for k2 in -kmax..=kmax {
        for k1 in -kmax..=kmax {
            // fill one half-plane and mirror it so the field is real
            if (k2, k1) < (0, 0) {
                continue;
            }
            let c = if (k1, k2) == (0, 0) {
                Complex64::new(r.gen_range(-1.0..1.0), 0.0)
            } else {
                Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
            };
            coef[idx(k1, k2)] = c;
            coef[idx(-k1, -k2)] = c.conj();
        }
    }
    ScalarField::from_spectral(grid, coef).unwrap().into_physical()
}

/// Divergence-free band-limited velocity with unit-order amplitude.
pub fn random_solenoidal(grid: Grid2D, kmax: i64, seed: u64) -> VectorField2 {
    let psi = random_band_limited(grid, kmax, seed);
    let v = perp_gradient(&psi);
    let scale = 1.0 / v.max_abs();
    v.scale(scale)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
