use std::borrow::Cow;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fft;
use super::grid::Grid2D;
use crate::error::{Error, Result};

/// Chunk length for reductions; fixed so sums are bitwise reproducible.
const REDUCE_CHUNK: usize = 1 << 14;

pub(crate) fn reproducible_sum<T, F>(data: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync + Send,
{
    let partial: Vec<f64> = data
        .par_chunks(REDUCE_CHUNK)
        .map(|c| c.iter().map(&f).sum::<f64>())
        .collect();
    partial.iter().sum()
}

pub(crate) fn reproducible_max<T, F>(data: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync + Send,
{
    data.par_iter().map(f).reduce(|| 0.0, f64::max)
}

/// Which of the two representations a field currently holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Physical,
    Spectral,
}

#[derive(Debug, Clone, PartialEq)]
enum Samples {
    Physical(Vec<f64>),
    Spectral(Vec<Complex64>),
}

/// Real scalar field on a [`Grid2D`], stored either as samples or as Fourier
/// coefficients. Row-major with `x1` varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid2D,
    samples: Samples,
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::config("p", format!("L^p exponent must satisfy p >= 1, got {p}")))
    }
}

fn check_same_grid(a: &Grid2D, b: &Grid2D) {
    assert_eq!(a, b, "fields live on different grids");
}

impl ScalarField {
    pub fn zeros(grid: Grid2D) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid2D, c: f64) -> Self {
        Self {
            grid,
            samples: Samples::Physical(vec![c; grid.len()]),
        }
    }

    pub fn zeros_spectral(grid: Grid2D) -> Self {
        Self {
            grid,
            samples: Samples::Spectral(vec![Complex64::default(); grid.len()]),
        }
    }

    /// Samples `f(x1, x2)` at the grid points.
    pub fn from_fn<F: Fn(f64, f64) -> f64 + Sync>(grid: Grid2D, f: F) -> Self {
        let n = grid.n();
        let xs = grid.coordinates();
        let mut values = vec![0.0; grid.len()];
        values.par_chunks_mut(n).enumerate().for_each(|(i2, row)| {
            let x2 = xs[i2];
            for (v, &x1) in row.iter_mut().zip(&xs) {
                *v = f(x1, x2);
            }
        });
        Self {
            grid,
            samples: Samples::Physical(values),
        }
    }

    /// Tensor product `a(x1) b(x2)` of two 1D sample vectors.
    pub fn separable(grid: Grid2D, a: &[f64], b: &[f64]) -> Self {
        let n = grid.n();
        assert!(a.len() == n && b.len() == n, "1D profiles must have N samples");
        let mut values = vec![0.0; grid.len()];
        values.par_chunks_mut(n).zip(b.par_iter()).for_each(|(row, &bv)| {
            for (v, &av) in row.iter_mut().zip(a) {
                *v = av * bv;
            }
        });
        Self {
            grid,
            samples: Samples::Physical(values),
        }
    }

    /// Tensor product of two 1D coefficient vectors, in spectral form.
    pub fn separable_spectral(grid: Grid2D, a: &[Complex64], b: &[Complex64]) -> Self {
        let n = grid.n();
        assert!(a.len() == n && b.len() == n, "1D spectra must have N coefficients");
        let mut coef = vec![Complex64::default(); grid.len()];
        coef.par_chunks_mut(n).zip(b.par_iter()).for_each(|(row, &bv)| {
            for (c, &av) in row.iter_mut().zip(a) {
                *c = av * bv;
            }
        });
        Self {
            grid,
            samples: Samples::Spectral(coef),
        }
    }

    pub fn from_physical(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::config(
                "data",
                format!("expected {} samples, got {}", grid.len(), values.len()),
            ));
        }
        Ok(Self {
            grid,
            samples: Samples::Physical(values),
        })
    }

    pub fn from_spectral(grid: Grid2D, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != grid.len() {
            return Err(Error::config(
                "data",
                format!("expected {} coefficients, got {}", grid.len(), coefficients.len()),
            ));
        }
        Ok(Self {
            grid,
            samples: Samples::Spectral(coefficients),
        })
    }

    #[inline]
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        match self.samples {
            Samples::Physical(_) => Representation::Physical,
            Samples::Spectral(_) => Representation::Spectral,
        }
    }

    /// Physical samples, if that is the current representation.
    pub fn physical(&self) -> Option<&[f64]> {
        match &self.samples {
            Samples::Physical(v) => Some(v),
            Samples::Spectral(_) => None,
        }
    }

    /// Fourier coefficients, if that is the current representation.
    pub fn spectral(&self) -> Option<&[Complex64]> {
        match &self.samples {
            Samples::Spectral(c) => Some(c),
            Samples::Physical(_) => None,
        }
    }

    /// Physical samples, transforming if necessary.
    pub fn values(&self) -> Cow<'_, [f64]> {
        match &self.samples {
            Samples::Physical(v) => Cow::Borrowed(v),
            Samples::Spectral(c) => Cow::Owned(fft::inverse_real(c, self.grid.n())),
        }
    }

    /// Fourier coefficients, transforming if necessary.
    pub fn coefficients(&self) -> Cow<'_, [Complex64]> {
        match &self.samples {
            Samples::Spectral(c) => Cow::Borrowed(c),
            Samples::Physical(v) => Cow::Owned(fft::forward_real(v, self.grid.n())),
        }
    }

    /// Coefficient at integer wavenumber `(k1, k2)`.
    pub fn coefficient(&self, k1: i64, k2: i64) -> Complex64 {
        let n = self.grid.n() as i64;
        let i1 = k1.rem_euclid(n) as usize;
        let i2 = k2.rem_euclid(n) as usize;
        self.coefficients()[i2 * n as usize + i1]
    }

    pub fn to_spectral(&self) -> Result<Self> {
        match &self.samples {
            Samples::Physical(v) => Ok(Self {
                grid: self.grid,
                samples: Samples::Spectral(fft::forward_real(v, self.grid.n())),
            }),
            Samples::Spectral(_) => Err(Error::Representation {
                expected: Representation::Physical,
                found: Representation::Spectral,
            }),
        }
    }

    /// Inverse transform. The imaginary part of the synthesis is discarded;
    /// coefficients of real fields are conjugate-symmetric so it vanishes.
    pub fn to_physical(&self) -> Result<Self> {
        match &self.samples {
            Samples::Spectral(c) => Ok(Self {
                grid: self.grid,
                samples: Samples::Physical(fft::inverse_real(c, self.grid.n())),
            }),
            Samples::Physical(_) => Err(Error::Representation {
                expected: Representation::Spectral,
                found: Representation::Physical,
            }),
        }
    }

    pub fn into_spectral(self) -> Self {
        match self.samples {
            Samples::Spectral(_) => self,
            Samples::Physical(ref v) => Self {
                grid: self.grid,
                samples: Samples::Spectral(fft::forward_real(v, self.grid.n())),
            },
        }
    }

    pub fn into_physical(self) -> Self {
        match self.samples {
            Samples::Physical(_) => self,
            Samples::Spectral(ref c) => Self {
                grid: self.grid,
                samples: Samples::Physical(fft::inverse_real(c, self.grid.n())),
            },
        }
    }

    pub fn into_representation(self, repr: Representation) -> Self {
        match repr {
            Representation::Physical => self.into_physical(),
            Representation::Spectral => self.into_spectral(),
        }
    }

    /// `m(D) f`: scales the coefficient at `xi` by `m(xi1, xi2)`.
    pub fn apply_multiplier<M>(&self, m: M) -> Self
    where
        M: Fn(f64, f64) -> Complex64 + Sync,
    {
        let repr = self.representation();
        let grid = self.grid;
        let n = grid.n();
        let freqs = grid.frequencies();
        let mut coef = self.coefficients().into_owned();
        coef.par_chunks_mut(n).enumerate().for_each(|(i2, row)| {
            let xi2 = freqs[i2];
            for (c, &xi1) in row.iter_mut().zip(&freqs) {
                *c *= m(xi1, xi2);
            }
        });
        Self {
            grid,
            samples: Samples::Spectral(coef),
        }
        .into_representation(repr)
    }

    /// Real-valued multiplier; avoids complex products for radial filters.
    pub fn apply_real_multiplier<M>(&self, m: M) -> Self
    where
        M: Fn(f64, f64) -> f64 + Sync,
    {
        self.apply_multiplier(|a, b| Complex64::new(m(a, b), 0.0))
    }

    /// `||m(D) f||_{L^2}` via discrete Parseval, without forming `m(D) f`.
    pub fn multiplier_l2_norm<M>(&self, m: M) -> f64
    where
        M: Fn(f64, f64) -> f64 + Sync,
    {
        let n = self.grid.n();
        let freqs = self.grid.frequencies();
        let coef = self.coefficients();
        let partial: Vec<f64> = coef
            .par_chunks(n)
            .enumerate()
            .map(|(i2, row)| {
                let xi2 = freqs[i2];
                row.iter()
                    .zip(&freqs)
                    .map(|(c, &xi1)| {
                        let w = m(xi1, xi2);
                        if w == 0.0 {
                            0.0
                        } else {
                            w * w * c.norm_sqr()
                        }
                    })
                    .sum::<f64>()
            })
            .collect();
        let l = self.grid.period();
        (partial.iter().sum::<f64>()).sqrt() * l
    }

    /// `L^2` norm from the coefficients: `||f||^2 = L^2 sum |f_hat|^2`.
    pub fn parseval_l2(&self) -> f64 {
        let coef = self.coefficients();
        reproducible_sum(&coef, |c| c.norm_sqr()).sqrt() * self.grid.period()
    }

    /// Rectangle-rule `L^p` norm; `p = f64::INFINITY` gives the grid maximum.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_p(p)?;
        let values = self.values();
        Ok(lp_of_magnitudes(&values, p, self.grid.cell_area(), |v| v.abs()))
    }

    pub fn max_abs(&self) -> f64 {
        reproducible_max(&self.values(), |v| v.abs())
    }

    /// `a * self + b * other`, in the representation of `self`.
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Self {
        check_same_grid(&self.grid, &other.grid);
        let samples = match &self.samples {
            Samples::Physical(x) => {
                let y = other.values();
                Samples::Physical(x.par_iter().zip(y.par_iter()).map(|(x, y)| a * x + b * y).collect())
            }
            Samples::Spectral(x) => {
                let y = other.coefficients();
                Samples::Spectral(x.par_iter().zip(y.par_iter()).map(|(x, y)| a * x + b * y).collect())
            }
        };
        Self {
            grid: self.grid,
            samples,
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        let samples = match &self.samples {
            Samples::Physical(x) => Samples::Physical(x.par_iter().map(|v| c * v).collect()),
            Samples::Spectral(x) => Samples::Spectral(x.par_iter().map(|v| c * v).collect()),
        };
        Self {
            grid: self.grid,
            samples,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.lin_comb(1.0, other, -1.0)
    }

    /// Pointwise product, formed in physical space.
    pub fn mul(&self, other: &Self) -> Self {
        check_same_grid(&self.grid, &other.grid);
        let (x, y) = (self.values(), other.values());
        Self {
            grid: self.grid,
            samples: Samples::Physical(x.par_iter().zip(y.par_iter()).map(|(x, y)| x * y).collect()),
        }
    }

    pub fn is_finite(&self) -> bool {
        match &self.samples {
            Samples::Physical(x) => x.par_iter().all(|v| v.is_finite()),
            Samples::Spectral(x) => x.par_iter().all(|v| v.re.is_finite() && v.im.is_finite()),
        }
    }
}

pub(crate) fn lp_of_magnitudes<T: Sync>(data: &[T], p: f64, area: f64, mag: impl Fn(&T) -> f64 + Sync + Send) -> f64 {
    if p.is_infinite() {
        reproducible_max(data, mag)
    } else if p == 2.0 {
        (reproducible_sum(data, |v| {
            let m = mag(v);
            m * m
        }) * area)
            .sqrt()
    } else {
        (reproducible_sum(data, |v| mag(v).powf(p)) * area).powf(1.0 / p)
    }
}

/// Two-component vector field; both components share grid and representation.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField2 {
    pub(crate) u1: ScalarField,
    pub(crate) u2: ScalarField,
}

impl VectorField2 {
    pub fn new(u1: ScalarField, u2: ScalarField) -> Result<Self> {
        if u1.grid() != u2.grid() {
            return Err(Error::GridMismatch("vector components".into()));
        }
        if u1.representation() != u2.representation() {
            return Err(Error::Representation {
                expected: u1.representation(),
                found: u2.representation(),
            });
        }
        Ok(Self { u1, u2 })
    }

    /// Builds from components, coercing the second to the first's representation.
    pub fn from_components(u1: ScalarField, u2: ScalarField) -> Self {
        let u2 = u2.into_representation(u1.representation());
        Self::new(u1, u2).expect("components on one grid")
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            u1: ScalarField::zeros(grid),
            u2: ScalarField::zeros(grid),
        }
    }

    pub fn zeros_spectral(grid: Grid2D) -> Self {
        Self {
            u1: ScalarField::zeros_spectral(grid),
            u2: ScalarField::zeros_spectral(grid),
        }
    }

    pub fn from_fn<F, G>(grid: Grid2D, f1: F, f2: G) -> Self
    where
        F: Fn(f64, f64) -> f64 + Sync,
        G: Fn(f64, f64) -> f64 + Sync,
    {
        Self {
            u1: ScalarField::from_fn(grid, f1),
            u2: ScalarField::from_fn(grid, f2),
        }
    }

    #[inline]
    pub fn grid(&self) -> &Grid2D {
        self.u1.grid()
    }

    pub fn u1(&self) -> &ScalarField {
        &self.u1
    }

    pub fn u2(&self) -> &ScalarField {
        &self.u2
    }

    pub fn into_components(self) -> (ScalarField, ScalarField) {
        (self.u1, self.u2)
    }

    pub fn representation(&self) -> Representation {
        self.u1.representation()
    }

    fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self {
            u1: f(&self.u1),
            u2: f(&self.u2),
        }
    }

    fn try_map(&self, f: impl Fn(&ScalarField) -> Result<ScalarField>) -> Result<Self> {
        Ok(Self {
            u1: f(&self.u1)?,
            u2: f(&self.u2)?,
        })
    }

    pub fn to_spectral(&self) -> Result<Self> {
        self.try_map(ScalarField::to_spectral)
    }

    pub fn to_physical(&self) -> Result<Self> {
        self.try_map(ScalarField::to_physical)
    }

    pub fn into_spectral(self) -> Self {
        Self {
            u1: self.u1.into_spectral(),
            u2: self.u2.into_spectral(),
        }
    }

    pub fn into_physical(self) -> Self {
        Self {
            u1: self.u1.into_physical(),
            u2: self.u2.into_physical(),
        }
    }

    pub fn into_representation(self, repr: Representation) -> Self {
        Self {
            u1: self.u1.into_representation(repr),
            u2: self.u2.into_representation(repr),
        }
    }

    pub fn apply_multiplier<M>(&self, m: M) -> Self
    where
        M: Fn(f64, f64) -> Complex64 + Sync,
    {
        self.map(|c| c.apply_multiplier(&m))
    }

    pub fn apply_real_multiplier<M>(&self, m: M) -> Self
    where
        M: Fn(f64, f64) -> f64 + Sync,
    {
        self.map(|c| c.apply_real_multiplier(&m))
    }

    pub fn multiplier_l2_norm<M>(&self, m: M) -> f64
    where
        M: Fn(f64, f64) -> f64 + Sync,
    {
        self.u1.multiplier_l2_norm(&m).hypot(self.u2.multiplier_l2_norm(&m))
    }

    pub fn parseval_l2(&self) -> f64 {
        self.u1.parseval_l2().hypot(self.u2.parseval_l2())
    }

    /// `L^p` norm of the pointwise Euclidean magnitude.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_p(p)?;
        let (a, b) = (self.u1.values(), self.u2.values());
        let pairs: Vec<(f64, f64)> = a.par_iter().copied().zip(b.par_iter().copied()).collect();
        Ok(lp_of_magnitudes(&pairs, p, self.grid().cell_area(), |(x, y)| x.hypot(*y)))
    }

    pub fn max_abs(&self) -> f64 {
        let (a, b) = (self.u1.values(), self.u2.values());
        a.par_iter()
            .zip(b.par_iter())
            .map(|(x, y)| x.hypot(*y))
            .reduce(|| 0.0, f64::max)
    }

    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Self {
        Self {
            u1: self.u1.lin_comb(a, &other.u1, b),
            u2: self.u2.lin_comb(a, &other.u2, b),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|f| f.scale(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.lin_comb(1.0, other, -1.0)
    }

    pub fn is_finite(&self) -> bool {
        self.u1.is_finite() && self.u2.is_finite()
    }
}

/// Operations shared by scalar and vector fields; the Littlewood-Paley and
/// Besov machinery is generic over this.
pub trait Field: Clone + Send + Sync {
    fn grid(&self) -> &Grid2D;
    fn representation(&self) -> Representation;
    fn apply_real_multiplier<M: Fn(f64, f64) -> f64 + Sync>(&self, m: M) -> Self;
    fn multiplier_l2_norm<M: Fn(f64, f64) -> f64 + Sync>(&self, m: M) -> f64;
    fn lp_norm(&self, p: f64) -> Result<f64>;
    fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Self;
    fn into_spectral(self) -> Self;
    fn into_physical(self) -> Self;

    fn scale(&self, c: f64) -> Self {
        self.lin_comb(c, self, 0.0)
    }
}

impl Field for ScalarField {
    fn grid(&self) -> &Grid2D {
        ScalarField::grid(self)
    }
    fn representation(&self) -> Representation {
        ScalarField::representation(self)
    }
    fn apply_real_multiplier<M: Fn(f64, f64) -> f64 + Sync>(&self, m: M) -> Self {
        ScalarField::apply_real_multiplier(self, m)
    }
    fn multiplier_l2_norm<M: Fn(f64, f64) -> f64 + Sync>(&self, m: M) -> f64 {
        ScalarField::multiplier_l2_norm(self, m)
    }
    fn lp_norm(&self, p: f64) -> Result<f64> {
        ScalarField::lp_norm(self, p)
    }
    fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Self {
        ScalarField::lin_comb(self, a, other, b)
    }
    fn into_spectral(self) -> Self {
        ScalarField::into_spectral(self)
    }
    fn into_physical(self) -> Self {
        ScalarField::into_physical(self)
    }
    fn scale(&self, c: f64) -> Self {
        ScalarField::scale(self, c)
    }
}

impl Field for VectorField2 {
    fn grid(&self) -> &Grid2D {
        VectorField2::grid(self)
    }
    fn representation(&self) -> Representation {
        VectorField2::representation(self)
    }
    fn apply_real_multiplier<M: Fn(f64, f64) -> f64 + Sync>(&self, m: M) -> Self {
        VectorField2::apply_real_multiplier(self, m)
    }
    fn multiplier_l2_norm<M: Fn(f64, f64) -> f64 + Sync>(&self, m: M) -> f64 {
        VectorField2::multiplier_l2_norm(self, m)
    }
    fn lp_norm(&self, p: f64) -> Result<f64> {
        VectorField2::lp_norm(self, p)
    }
    fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Self {
        VectorField2::lin_comb(self, a, other, b)
    }
    fn into_spectral(self) -> Self {
        VectorField2::into_spectral(self)
    }
    fn into_physical(self) -> Self {
        VectorField2::into_physical(self)
    }
    fn scale(&self, c: f64) -> Self {
        VectorField2::scale(self, c)
    }
}
