//! Smooth dyadic partition of unity, inhomogeneous and homogeneous blocks, and
//! Besov norms built from them.
//!
//! The ball cutoff is `chi(r) = 1 - S((r - 3/4) / (4/3 - 3/4))` with the
//! standard `exp(-1/t)` smooth step `S`, and the annulus profile is the
//! telescoping difference `phi(r) = chi(r/2) - chi(r)`, so that
//! `chi(r) + sum_{j>=0} phi(2^-j r)` collapses to `chi(2^-J r) = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{check_p, Field, Grid2D};

/// Smallest homogeneous block index kept when none is specified.
pub const DEFAULT_J_MIN_HOMOG: i32 = -8;

const CHI_INNER: f64 = 3.0 / 4.0;
const CHI_OUTER: f64 = 4.0 / 3.0;

#[inline]
fn psi(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// `C^inf` step: 0 for `t <= 0`, 1 for `t >= 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = psi(t);
        a / (a + psi(1.0 - t))
    }
}

/// The low-frequency ball profile: 1 on `r <= 3/4`, 0 on `r >= 4/3`.
pub fn chi(r: f64) -> f64 {
    1.0 - smooth_step((r - CHI_INNER) / (CHI_OUTER - CHI_INNER))
}

/// The annulus profile, supported in `[3/4, 8/3]` and equal to 1 on `[4/3, 3/2]`.
pub fn phi(r: f64) -> f64 {
    chi(0.5 * r) - chi(r)
}

/// Dyadic scale factor `2^j` for possibly negative `j`.
#[inline]
pub fn dyadic(j: i32) -> f64 {
    2f64.powi(j)
}

/// The radial cutoffs realised on one grid's frequency lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpFamily {
    grid: Grid2D,
    j_max: i32,
    j_min_homog: i32,
}

impl LpFamily {
    pub fn new(grid: Grid2D, j_min_homog: i32) -> Result<Self> {
        if j_min_homog > -1 {
            return Err(Error::config(
                "j_min_homog",
                format!("homogeneous truncation must be <= -1, got {j_min_homog}"),
            ));
        }
        // Block j meets the lattice iff its inner radius 2^j * 3/4 is below the corner mode.
        let top = grid.max_frequency();
        let mut j_max = 0;
        while CHI_INNER * dyadic(j_max + 1) < top {
            j_max += 1;
        }
        Ok(Self {
            grid,
            j_max,
            j_min_homog,
        })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn j_min_homog(&self) -> i32 {
        self.j_min_homog
    }

    pub fn chi(&self, r: f64) -> f64 {
        chi(r)
    }

    pub fn phi(&self, r: f64) -> f64 {
        phi(r)
    }

    /// Radial multiplier of inhomogeneous block `j` at `|xi| = r`.
    pub fn block_profile(&self, j: i32, r: f64) -> f64 {
        if j == -1 {
            chi(r)
        } else {
            phi(r / dyadic(j))
        }
    }

    fn check_block(&self, j: i32) -> Result<()> {
        if (-1..=self.j_max).contains(&j) {
            Ok(())
        } else {
            Err(Error::Range {
                what: "dyadic block",
                index: j as i64,
                min: -1,
                max: self.j_max as i64,
            })
        }
    }

    fn check_homogeneous_block(&self, j: i32) -> Result<()> {
        if (self.j_min_homog..=self.j_max).contains(&j) {
            Ok(())
        } else {
            Err(Error::Range {
                what: "homogeneous block",
                index: j as i64,
                min: self.j_min_homog as i64,
                max: self.j_max as i64,
            })
        }
    }

    fn lattice_radii(&self) -> impl Iterator<Item = f64> + '_ {
        let freqs = self.grid.frequencies();
        let n = self.grid.n();
        (0..n * n).map(move |idx| freqs[idx % n].hypot(freqs[idx / n]))
    }

    /// `max |chi + sum_j phi_j - 1|` over every lattice point.
    pub fn partition_defect(&self) -> f64 {
        self.lattice_radii()
            .map(|r| {
                let total: f64 = chi(r) + (0..=self.j_max).map(|j| phi(r / dyadic(j))).sum::<f64>();
                (total - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Range of `chi^2 + sum_j phi_j^2` over the lattice; should lie in `[1/2, 1]`.
    pub fn square_sum_range(&self) -> (f64, f64) {
        self.lattice_radii()
            .map(|r| {
                chi(r).powi(2) + (0..=self.j_max).map(|j| phi(r / dyadic(j)).powi(2)).sum::<f64>()
            })
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }
}

pub fn build_lp_family(grid: Grid2D, j_min_homog: i32) -> Result<LpFamily> {
    LpFamily::new(grid, j_min_homog)
}

/// `Delta_j f` for `j >= -1`.
pub fn dyadic_block<F: Field>(f: &F, j: i32, fam: &LpFamily) -> Result<F> {
    fam.check_block(j)?;
    Ok(f.apply_real_multiplier(|a, b| fam.block_profile(j, a.hypot(b))))
}

/// Homogeneous block `phi(2^-j |D|) f`, for any `j` in `[j_min_homog, j_max]`.
pub fn homogeneous_block<F: Field>(f: &F, j: i32, fam: &LpFamily) -> Result<F> {
    fam.check_homogeneous_block(j)?;
    let scale = dyadic(j);
    Ok(f.apply_real_multiplier(|a, b| phi(a.hypot(b) / scale)))
}

/// Exponents of a Besov norm `B^s_{p,r}` or its homogeneous version.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub s: f64,
    pub p: f64,
    pub r: f64,
    pub homogeneous: bool,
    /// Lowest homogeneous block; ignored for inhomogeneous norms.
    pub j_min: i32,
}

impl BesovParams {
    /// `B^s_{p,inf}`.
    pub fn inhomogeneous(s: f64, p: f64) -> Self {
        Self {
            s,
            p,
            r: f64::INFINITY,
            homogeneous: false,
            j_min: -1,
        }
    }

    /// Homogeneous `B^s_{p,inf}` truncated below at `j_min`.
    pub fn homogeneous(s: f64, p: f64, j_min: i32) -> Self {
        Self {
            s,
            p,
            r: f64::INFINITY,
            homogeneous: true,
            j_min,
        }
    }

    pub fn with_r(mut self, r: f64) -> Self {
        self.r = r;
        self
    }

    fn validate(&self, fam: &LpFamily) -> Result<()> {
        check_p(self.p)?;
        if self.r.is_nan() || self.r < 1.0 {
            return Err(Error::config("r", format!("summability index must be >= 1, got {}", self.r)));
        }
        if !self.s.is_finite() {
            return Err(Error::config("s", "regularity must be finite"));
        }
        if self.homogeneous && self.j_min < fam.j_min_homog() {
            return Err(Error::config(
                "j_min",
                format!(
                    "homogeneous norm starts at {} but the family is truncated at {}",
                    self.j_min,
                    fam.j_min_homog()
                ),
            ));
        }
        Ok(())
    }

    fn block_range(&self, fam: &LpFamily) -> std::ops::RangeInclusive<i32> {
        let lo = if self.homogeneous { self.j_min } else { -1 };
        lo..=fam.j_max()
    }
}

/// Weighted block norms `2^{sj} ||Delta_j f||_{L^p}`, one entry per block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesovProfile {
    pub r: f64,
    pub blocks: Vec<(i32, f64)>,
}

impl BesovProfile {
    pub fn norm(&self) -> f64 {
        if self.r.is_infinite() {
            self.blocks.iter().map(|&(_, v)| v).fold(0.0, f64::max)
        } else {
            self.blocks.iter().map(|&(_, v)| v.powf(self.r)).sum::<f64>().powf(1.0 / self.r)
        }
    }

    /// Block index carrying the largest weighted norm (first one on ties).
    pub fn dominant_block(&self) -> Option<i32> {
        self.blocks
            .iter()
            .fold(None, |best: Option<(i32, f64)>, &(j, v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((j, v)),
            })
            .map(|(j, _)| j)
    }

    pub fn weighted(&self, j: i32) -> Option<f64> {
        self.blocks.iter().find(|(i, _)| *i == j).map(|&(_, v)| v)
    }
}

/// `||Delta_j f||_{L^p}`; `p = 2` goes through Parseval, which equals the
/// rectangle rule exactly for grid functions.
pub fn block_lp_norm<F: Field>(f: &F, j: i32, homogeneous: bool, p: f64, fam: &LpFamily) -> Result<f64> {
    if homogeneous {
        fam.check_homogeneous_block(j)?;
    } else {
        fam.check_block(j)?;
    }
    let scale = dyadic(j);
    let profile = |a: f64, b: f64| {
        let r = a.hypot(b);
        if homogeneous || j >= 0 {
            phi(r / scale)
        } else {
            chi(r)
        }
    };
    if p == 2.0 {
        Ok(f.multiplier_l2_norm(profile))
    } else {
        f.apply_real_multiplier(profile).lp_norm(p)
    }
}

pub fn besov_profile<F: Field>(f: &F, params: &BesovParams, fam: &LpFamily) -> Result<BesovProfile> {
    params.validate(fam)?;
    // transform once; every block then filters the same coefficients
    let spectral = f.clone().into_spectral();
    let blocks = params
        .block_range(fam)
        .map(|j| {
            let norm = block_lp_norm(&spectral, j, params.homogeneous, params.p, fam)?;
            Ok((j, dyadic(j).powf(params.s) * norm))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BesovProfile { r: params.r, blocks })
}

pub fn besov_norm<F: Field>(f: &F, params: &BesovParams, fam: &LpFamily) -> Result<f64> {
    Ok(besov_profile(f, params, fam)?.norm())
}
