//! The lacunary divergence-free initial datum, its building blocks, and the
//! operators acting on it: the convective term and the Leray projectors.
//!
//! All profiles are centred at `(L/2, L/2)`. Carrier phases are reduced with
//! integer arithmetic so that every carrier is an exact lattice mode.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::littlewood_paley::smooth_step;
use crate::spectral::{gradient, perp_gradient, Grid2D, ScalarField, VectorField2};

/// Carrier frequency of packet `m` is `CARRIER * 2^m`.
pub const CARRIER: f64 = 17.0 / 12.0;
/// The bump transform is identically 1 on `|xi| <= BUMP_FLAT`.
pub const BUMP_FLAT: f64 = 1.0 / 16.0;
/// The bump transform vanishes on `|xi| >= BUMP_RADIUS`.
pub const BUMP_RADIUS: f64 = 1.0 / 4.0;

/// Transform of the bump: smooth, even, 1 near the origin, supported in `|xi| < 1/4`.
pub fn bump_transform(xi: f64) -> f64 {
    1.0 - smooth_step((xi.abs() - BUMP_FLAT) / (BUMP_RADIUS - BUMP_FLAT))
}

/// Fraction of each axis' Nyquist band kept by the product dealiasing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dealias {
    fraction: f64,
}

impl Default for Dealias {
    fn default() -> Self {
        Self::two_thirds()
    }
}

impl Dealias {
    pub fn two_thirds() -> Self {
        Self { fraction: 2.0 / 3.0 }
    }

    pub fn new(fraction: f64) -> Result<Self> {
        if fraction > 0.0 && fraction <= 1.0 {
            Ok(Self { fraction })
        } else {
            Err(Error::config("dealias", format!("fraction must lie in (0, 1], got {fraction}")))
        }
    }

    pub fn fraction(&self) -> f64 {
        self.fraction
    }

    /// Angular-frequency cutoff `fraction * Nyquist`.
    pub fn cutoff(&self, grid: &Grid2D) -> f64 {
        self.fraction * grid.nyquist()
    }

    /// Modes with `|k_i| < fraction * N/2` on both axes survive.
    fn keeps(&self, grid: &Grid2D, xi: f64) -> bool {
        xi.abs() < self.cutoff(grid) * (1.0 - 1e-12)
    }

    pub fn truncate_scalar(&self, f: &ScalarField) -> ScalarField {
        let g = *f.grid();
        f.apply_real_multiplier(|a, b| if self.keeps(&g, a) && self.keeps(&g, b) { 1.0 } else { 0.0 })
    }

    pub fn truncate(&self, v: &VectorField2) -> VectorField2 {
        VectorField2::from_components(self.truncate_scalar(v.u1()), self.truncate_scalar(v.u2()))
    }
}

/// Integer multiple of the lattice step that equals the carrier of packet `m`.
fn carrier_index(grid: &Grid2D, m: u32) -> Result<i64> {
    let xi = CARRIER * 2f64.powi(m as i32);
    grid.lattice_index(xi).ok_or_else(|| {
        Error::config(
            "L",
            format!("carrier {xi} of packet {m} is not a lattice frequency; use L a multiple of 24 pi"),
        )
    })
}

fn check_carrier(grid: &Grid2D, m: u32) -> Result<i64> {
    let q = carrier_index(grid, m)?;
    let top = CARRIER * 2f64.powi(m as i32) + BUMP_RADIUS;
    let cutoff = Dealias::two_thirds().cutoff(grid);
    if top >= cutoff {
        return Err(Error::config(
            "N",
            format!("packet {m} reaches |xi| = {top:.3}, above the dealiasing cutoff {cutoff:.3}"),
        ));
    }
    Ok(q)
}

/// `cos(q * 2 pi (x - L/2) / L)` and the matching sine along one axis.
fn carrier_samples(grid: &Grid2D, q: i64) -> (Vec<f64>, Vec<f64>) {
    let n = grid.n() as i64;
    let half = n / 2;
    (0..n)
        .map(|i| {
            let phase = (q.rem_euclid(n) * (i - half).rem_euclid(n)).rem_euclid(n);
            let angle = 2.0 * std::f64::consts::PI * phase as f64 / n as f64;
            (angle.cos(), angle.sin())
        })
        .unzip()
}

/// The 1D bump and its first two derivatives sampled along an axis, centred at `L/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpProfile {
    grid: Grid2D,
    pub values: Vec<f64>,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

impl BumpProfile {
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    /// `phi(x1) phi(x2)` as a field.
    pub fn tensor_field(&self) -> ScalarField {
        ScalarField::separable(self.grid, &self.values, &self.values)
    }

    /// `max |phi|` on the boundary column relative to the peak; measures periodisation.
    pub fn boundary_tail(&self) -> f64 {
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.values[0].abs() / peak
    }
}

/// Samples the bump whose transform is [`bump_transform`], normalised so `int phi = 1`.
pub fn build_bump(grid: &Grid2D) -> BumpProfile {
    let n = grid.n();
    let l = grid.period();
    let center = grid.center();
    let i = Complex64::new(0.0, 1.0);
    let base: Vec<Complex64> = (0..n)
        .map(|idx| {
            let xi = grid.frequency(idx);
            let h = bump_transform(xi);
            if h == 0.0 {
                Complex64::default()
            } else {
                (h / l) * Complex64::from_polar(1.0, -xi * center)
            }
        })
        .collect();
    let synth = |mult: &dyn Fn(f64) -> Complex64| -> Vec<f64> {
        let c: Vec<Complex64> = base
            .iter()
            .enumerate()
            .map(|(idx, &c)| c * mult(grid.frequency(idx)))
            .collect();
        crate::spectral::inverse_1d(&c).into_iter().map(|z| z.re).collect()
    };
    BumpProfile {
        grid: *grid,
        values: synth(&|_| Complex64::new(1.0, 0.0)),
        first: synth(&|xi| i * xi),
        second: synth(&|xi| Complex64::new(-xi * xi, 0.0)),
    }
}

/// Parameters of the truncated lacunary datum `u0 = sum_{j=0}^{J} f_{kj}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub sigma: f64,
    pub p: f64,
    pub k: u32,
    /// Truncation index `J`.
    pub j_trunc: u32,
    pub grid: Grid2D,
}

impl ConstructionParams {
    pub fn validate(&self) -> Result<()> {
        if self.p.is_nan() || self.p < 1.0 {
            return Err(Error::config("p", format!("p must be >= 1, got {}", self.p)));
        }
        let threshold = 1.0 + 2.0 / self.p;
        if self.sigma.is_nan() || self.sigma <= threshold {
            return Err(Error::config(
                "sigma",
                format!("sigma must exceed 1 + 2/p = {threshold}, got {}", self.sigma),
            ));
        }
        if self.k == 0 {
            return Err(Error::config("k", "lacunary gap k must be positive"));
        }
        for j in 0..=self.j_trunc {
            check_carrier(&self.grid, self.k * j)?;
        }
        Ok(())
    }

    /// Packet index `k j`.
    pub fn packet_index(&self, j: u32) -> u32 {
        self.k * j
    }
}

/// `g_m(x) = phi(x1) cos(CARRIER 2^m x1) phi(x2)`, physical.
pub fn make_g(grid: &Grid2D, m: u32) -> Result<ScalarField> {
    let q = check_carrier(grid, m)?;
    let bump = build_bump(grid);
    let (cos, _) = carrier_samples(grid, q);
    let row: Vec<f64> = bump.values.iter().zip(&cos).map(|(p, c)| p * c).collect();
    Ok(ScalarField::separable(*grid, &row, &bump.values))
}

/// Transform of `g_m` from its two 1D factors.
fn g_spectrum(grid: &Grid2D, bump: &BumpProfile, m: u32) -> Result<ScalarField> {
    let q = check_carrier(grid, m)?;
    let (cos, _) = carrier_samples(grid, q);
    let row: Vec<f64> = bump.values.iter().zip(&cos).map(|(p, c)| p * c).collect();
    let row_hat = crate::spectral::forward_1d(&row);
    let col_hat = crate::spectral::forward_1d(&bump.values);
    Ok(ScalarField::separable_spectral(*grid, &row_hat, &col_hat))
}

fn packet(grid: &Grid2D, bump: &BumpProfile, m: u32, sigma: f64) -> Result<VectorField2> {
    let g = g_spectrum(grid, bump, m)?;
    Ok(perp_gradient(&g).scale(2f64.powf(-(m as f64) * (sigma + 1.0))))
}

/// `f_m = 2^{-m(sigma+1)} (-d2, d1) g_m`, in spectral form.
pub fn make_f(grid: &Grid2D, m: u32, sigma: f64) -> Result<VectorField2> {
    packet(grid, &build_bump(grid), m, sigma)
}

/// The packets `f_{kj}` for `j = 0..=J`, in spectral form.
pub fn make_packets(params: &ConstructionParams) -> Result<Vec<VectorField2>> {
    params.validate()?;
    let bump = build_bump(&params.grid);
    (0..=params.j_trunc)
        .map(|j| packet(&params.grid, &bump, params.packet_index(j), params.sigma))
        .collect()
}

/// `u0 = sum_{j=0}^{J} f_{kj}`, in spectral form.
pub fn make_u0(params: &ConstructionParams) -> Result<VectorField2> {
    params.validate()?;
    let bump = build_bump(&params.grid);
    let mut u0 = VectorField2::zeros_spectral(params.grid);
    for j in 0..=params.j_trunc {
        let f = packet(&params.grid, &bump, params.packet_index(j), params.sigma)?;
        u0 = u0.add(&f);
    }
    Ok(u0)
}

/// `(a . grad) b`, with inputs and product truncated by `dealias`. Spectral output.
pub fn advect(a: &VectorField2, b: &VectorField2, dealias: Dealias) -> VectorField2 {
    let a_t = dealias.truncate(a);
    let a1 = a_t.u1().clone().into_physical();
    let a2 = a_t.u2().clone().into_physical();
    let b_t = dealias.truncate(b);
    let component = |c: &ScalarField| {
        let g = gradient(c).into_physical();
        let (d1, d2) = (g.u1().physical().unwrap(), g.u2().physical().unwrap());
        let (x1, x2) = (a1.physical().unwrap(), a2.physical().unwrap());
        let vals: Vec<f64> = (0..d1.len())
            .into_par_iter()
            .map(|i| x1[i] * d1[i] + x2[i] * d2[i])
            .collect();
        let prod = ScalarField::from_physical(*c.grid(), vals).expect("grid-sized buffer");
        dealias.truncate_scalar(&prod.into_spectral())
    };
    VectorField2::from_components(component(b_t.u1()), component(b_t.u2()))
}

/// The convective term `(u . grad) u`, dealiased; output in the input's representation.
pub fn nonlinear_term(u: &VectorField2, dealias: Dealias) -> VectorField2 {
    advect(u, u, dealias).into_representation(u.representation())
}

fn project(v: &VectorField2, keep_solenoidal: bool) -> VectorField2 {
    let grid = *v.grid();
    let n = grid.n();
    let freqs = grid.frequencies();
    let a = v.u1().coefficients();
    let b = v.u2().coefficients();
    let (p1, p2): (Vec<Complex64>, Vec<Complex64>) = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (xi1, xi2) = (freqs[idx % n], freqs[idx / n]);
            let r2 = xi1 * xi1 + xi2 * xi2;
            let (va, vb) = (a[idx], b[idx]);
            let (q1, q2) = if r2 == 0.0 {
                (Complex64::default(), Complex64::default())
            } else {
                let dot = (va * xi1 + vb * xi2) / r2;
                (dot * xi1, dot * xi2)
            };
            if keep_solenoidal {
                (va - q1, vb - q2)
            } else {
                (q1, q2)
            }
        })
        .unzip();
    let u1 = ScalarField::from_spectral(grid, p1).expect("grid-sized buffer");
    let u2 = ScalarField::from_spectral(grid, p2).expect("grid-sized buffer");
    VectorField2::from_components(u1, u2).into_representation(v.representation())
}

/// Leray projector `I - xi xi^T / |xi|^2`; the mean mode passes through.
pub fn leray_p(v: &VectorField2) -> VectorField2 {
    project(v, true)
}

/// Complementary gradient projector `xi xi^T / |xi|^2`; kills the mean mode.
pub fn leray_q(v: &VectorField2) -> VectorField2 {
    project(v, false)
}

/// The four witness functions of the lower bound, physical.
#[derive(Debug, Clone)]
pub struct WitnessFunctions {
    pub h1: ScalarField,
    pub h2: ScalarField,
    pub h3: ScalarField,
    pub h4: ScalarField,
}

/// Witnesses for packet `kn` interacting with `f_0`:
///
/// * `h1 = phi(x1) cos(W x1) phi''(x2)`
/// * `h2 = [phi'(x1) cos(W x1) - W phi(x1) sin(W x1)] phi'(x2)`
/// * `h3 = [phi''(x1) cos(W x1) - 2 W phi'(x1) sin(W x1)] phi(x2)`
/// * `h4 = phi(x1)^2 cos(CARRIER x1) cos(W x1) phi(x2) phi'(x2)`
///
/// with `W = CARRIER 2^{kn}` and every `x` measured from the centre.
pub fn make_h(grid: &Grid2D, k: u32, n: u32) -> Result<WitnessFunctions> {
    let m = k * n;
    let q = check_carrier(grid, m)?;
    let q0 = check_carrier(grid, 0)?;
    let w = CARRIER * 2f64.powi(m as i32);
    let bump = build_bump(grid);
    let (cos, sin) = carrier_samples(grid, q);
    let (cos0, _) = carrier_samples(grid, q0);
    let (p, dp, ddp) = (&bump.values, &bump.first, &bump.second);
    let len = grid.n();
    let along = |f: &dyn Fn(usize) -> f64| (0..len).map(f).collect::<Vec<f64>>();

    let h1_row = along(&|i| p[i] * cos[i]);
    let h2_row = along(&|i| dp[i] * cos[i] - w * p[i] * sin[i]);
    let h3_row = along(&|i| ddp[i] * cos[i] - 2.0 * w * dp[i] * sin[i]);
    let h4_row = along(&|i| p[i] * p[i] * cos0[i] * cos[i]);
    let h4_col = along(&|i| p[i] * dp[i]);
    Ok(WitnessFunctions {
        h1: ScalarField::separable(*grid, &h1_row, ddp),
        h2: ScalarField::separable(*grid, &h2_row, dp),
        h3: ScalarField::separable(*grid, &h3_row, p),
        h4: ScalarField::separable(*grid, &h4_row, &h4_col),
    })
}
