use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Doubly periodic square grid `[0, L)^2` with `N` points per axis.
///
/// Index `i` along an axis carries the integer wavenumber `i` for `i < N/2` and
/// `i - N` otherwise, so the lattice per axis is `2 pi k / L` for
/// `k in [-N/2, N/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    n: usize,
    period: f64,
}

impl Grid2D {
    pub fn new(n: usize, period: f64) -> Result<Self> {
        if !n.is_power_of_two() {
            return Err(Error::config("N", format!("N must be a power of two, got {n}")));
        }
        if n < 8 {
            return Err(Error::config("N", format!("N must be at least 8, got {n}")));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::config("L", format!("L must be positive, got {period}")));
        }
        Ok(Self { n, period })
    }

    /// Points per axis.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Period per axis.
    #[inline]
    pub fn period(&self) -> f64 {
        self.period
    }

    /// Total number of samples, `N^2`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.period / self.n as f64
    }

    /// Area element of the rectangle rule.
    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dx()
    }

    /// Lattice spacing `2 pi / L`.
    #[inline]
    pub fn frequency_step(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// Integer wavenumber of array index `i`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Angular frequency `2 pi k / L` of array index `i`.
    #[inline]
    pub fn frequency(&self, i: usize) -> f64 {
        self.wavenumber(i) as f64 * self.frequency_step()
    }

    /// Per-axis frequencies in array order.
    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.frequency(i)).collect()
    }

    /// `pi N / L`, the magnitude of the most negative lattice frequency.
    #[inline]
    pub fn nyquist(&self) -> f64 {
        PI * self.n as f64 / self.period
    }

    /// Largest `|xi|` present on the 2D lattice (the corner mode).
    #[inline]
    pub fn max_frequency(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.nyquist()
    }

    /// Sample coordinate along an axis.
    #[inline]
    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coordinate(i)).collect()
    }

    /// Centre of the torus along each axis.
    #[inline]
    pub fn center(&self) -> f64 {
        0.5 * self.period
    }

    /// Integer lattice index of angular frequency `xi`, if `xi` lies on the lattice.
    pub fn lattice_index(&self, xi: f64) -> Option<i64> {
        let k = xi / self.frequency_step();
        let nearest = k.round();
        ((k - nearest).abs() <= 1e-9 * k.abs().max(1.0)).then_some(nearest as i64)
    }
}

/// Builds a validated grid; see [`Grid2D::new`].
pub fn make_grid(n: usize, period: f64) -> Result<Grid2D> {
    Grid2D::new(n, period)
}
