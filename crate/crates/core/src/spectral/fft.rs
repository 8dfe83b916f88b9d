//! Square 2D complex transforms built from cached rustfft plans.
//!
//! Forward transforms are normalised by `1/N^2` so coefficients are Fourier
//! series coefficients; the inverse is unnormalised.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

const TRANSPOSE_BLOCK: usize = 32;

type PlanCache = Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>;

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<PlanCache> = OnceLock::new();
    let forward = matches!(direction, FftDirection::Forward);
    let mut plans = PLANS.get_or_init(Default::default).lock().unwrap();
    plans
        .entry((n, forward))
        .or_insert_with(|| FftPlanner::new().plan_fft(n, direction))
        .clone()
}

fn rows_in_place(data: &mut [Complex64], n: usize, direction: FftDirection) {
    let fft = plan(n, direction);
    let scratch_len = fft.get_inplace_scratch_len();
    data.par_chunks_mut(n).for_each_init(
        || vec![Complex64::default(); scratch_len],
        |scratch, row| fft.process_with_scratch(row, scratch),
    );
}

struct TilePtr(*mut Complex64);
unsafe impl Send for TilePtr {}
unsafe impl Sync for TilePtr {}

/// In-place transpose of a square `n x n` matrix, tile pairs `(a, b)`/`(b, a)` swapped together.
fn transpose_in_place(data: &mut [Complex64], n: usize) {
    assert_eq!(data.len(), n * n);
    let block = TRANSPOSE_BLOCK.min(n);
    let tiles = n / block;
    let ptr = TilePtr(data.as_mut_ptr());
    let ptr = &ptr;
    (0..tiles).into_par_iter().for_each(|a| {
        for b in a..tiles {
            for r in 0..block {
                let row = a * block + r;
                let c_start = if a == b { r + 1 } else { 0 };
                for c in c_start..block {
                    let col = b * block + c;
                    // SAFETY: each unordered tile pair {a, b} is visited by exactly one task, and
                    // within a diagonal tile only the strict upper triangle is swapped.
                    unsafe {
                        std::ptr::swap(ptr.0.add(row * n + col), ptr.0.add(col * n + row));
                    }
                }
            }
        }
    });
}

fn transform_2d(data: &mut [Complex64], n: usize, direction: FftDirection) {
    rows_in_place(data, n, direction);
    transpose_in_place(data, n);
    rows_in_place(data, n, direction);
    transpose_in_place(data, n);
}

/// Forward transform of real samples, normalised so a constant `c` maps to `c` at the zero mode.
pub(crate) fn forward_real(values: &[f64], n: usize) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = values.par_iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform_2d(&mut out, n, FftDirection::Forward);
    let scale = 1.0 / (n * n) as f64;
    out.par_iter_mut().for_each(|c| *c *= scale);
    out
}

/// Inverse transform keeping the real part.
pub(crate) fn inverse_real(coefficients: &[Complex64], n: usize) -> Vec<f64> {
    let mut out = coefficients.to_vec();
    transform_2d(&mut out, n, FftDirection::Inverse);
    out.into_par_iter().map(|c| c.re).collect()
}

/// Unnormalised 1D inverse transform `x_i = sum_k c_k exp(2 pi i k i / n)`.
pub(crate) fn inverse_1d(coefficients: &[Complex64]) -> Vec<Complex64> {
    let mut data = coefficients.to_vec();
    plan(data.len(), FftDirection::Inverse).process(&mut data);
    data
}

/// 1D forward transform normalised by `1/n`.
pub(crate) fn forward_1d(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    plan(n, FftDirection::Forward).process(&mut data);
    let scale = 1.0 / n as f64;
    data.iter_mut().for_each(|c| *c *= scale);
    data
}
