//! Report types. Row structs fix the CSV column order: columns appear in field
//! declaration order, and `Row::COLUMNS` lists them for documentation and checks.

use std::collections::BTreeMap;

use besov_core::construction::ConstructionParams;
use besov_core::euler::SolverConfig;
use besov_core::spectral::Grid2D;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A table row of one experiment.
pub trait Row: Serialize + DeserializeOwned + Clone {
    const EXPERIMENT: &'static str;
    /// CSV header, in order.
    const COLUMNS: &'static [&'static str];
    /// Abscissa used for plots.
    const X: &'static str;
    /// Default plotted column and reference slopes.
    const PLOT: (&'static str, &'static [f64]);
}

// Every row ends with the parameters needed to re-run it on its own.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaRow {
    pub n: u32,
    /// `2^{kn(sigma-1)} ||Delta_{kn}(u0 . grad u0)||_{L^p}`.
    pub r_n: f64,
    pub h4_norm: f64,
    pub div_residual: f64,
    /// `||u0||_{B^sigma_{p,inf}}` with truncation `J` and `J - 1`.
    pub besov_j: f64,
    pub besov_j_minus_1: Option<f64>,
    pub diag_residual: f64,
    pub cross_residual: f64,
    pub i1_norm: f64,
    pub i2_norm: f64,
    pub i3_norm: f64,
    /// `r_n / ((17/12)^2 ||h4||)`.
    pub bound_ratio: f64,
    pub sigma: f64,
    pub p: f64,
    pub k: u32,
    pub j_trunc: u32,
    pub grid_n: usize,
    pub domain_l: f64,
}

impl Row for LemmaRow {
    const EXPERIMENT: &'static str = "verify_lemma";
    const COLUMNS: &'static [&'static str] = &[
        "n",
        "r_n",
        "h4_norm",
        "div_residual",
        "besov_j",
        "besov_j_minus_1",
        "diag_residual",
        "cross_residual",
        "i1_norm",
        "i2_norm",
        "i3_norm",
        "bound_ratio",
        "sigma",
        "p",
        "k",
        "j_trunc",
        "grid_n",
        "domain_l",
    ];
    const X: &'static str = "n";
    const PLOT: (&'static str, &'static [f64]) = ("r_n", &[0.0]);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemainderRow {
    pub t: f64,
    /// `||w(t, u0)||` in the homogeneous space of regularity `sigma - 2`.
    pub w_norm: f64,
    /// `||u(t) - u0||_{B^{sigma-1}_{p,inf}}`.
    pub departure: f64,
    pub sigma: f64,
    pub p: f64,
    pub k: u32,
    pub j_trunc: u32,
    pub grid_n: usize,
    pub domain_l: f64,
    pub dt: f64,
}

impl Row for RemainderRow {
    const EXPERIMENT: &'static str = "remainder_scaling";
    const COLUMNS: &'static [&'static str] = &["t", "w_norm", "departure", "sigma", "p", "k", "j_trunc", "grid_n", "domain_l", "dt"];
    const X: &'static str = "t";
    const PLOT: (&'static str, &'static [f64]) = ("w_norm", &[2.0]);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InflationRow {
    pub n: u32,
    pub t_n: f64,
    /// `||S_t u0 - u0||_{B^sigma_{p,inf}}`.
    pub d_n: f64,
    /// The same difference in `B^{sigma-1}_{p,inf}`.
    pub contrast: f64,
    /// Block achieving the supremum in `d_n`.
    pub dominant_block: Option<i32>,
    /// `t 2^{kn sigma} ||Delta_{kn}(u0 . grad u0)||_{L^p}`.
    pub chain_linear: f64,
    /// `t ||Q(u0 . grad u0)||_{B^sigma_{p,inf}}`.
    pub chain_q: f64,
    /// `2^{2kn} ||w(t, u0)||` in the homogeneous space of regularity `sigma - 2`.
    pub chain_w: f64,
    /// `2^{kn sigma} ||Delta_{kn}(S_t u0 - u0)||_{L^p}`, the block the lower bound targets.
    pub block_departure: f64,
    pub sigma: f64,
    pub p: f64,
    pub k: u32,
    pub j_trunc: u32,
    pub grid_n: usize,
    pub domain_l: f64,
    pub eps: f64,
    pub dt: f64,
}

impl Row for InflationRow {
    const EXPERIMENT: &'static str = "inflation";
    const COLUMNS: &'static [&'static str] = &[
        "n",
        "t_n",
        "d_n",
        "contrast",
        "dominant_block",
        "chain_linear",
        "chain_q",
        "chain_w",
        "block_departure",
        "sigma",
        "p",
        "k",
        "j_trunc",
        "grid_n",
        "domain_l",
        "eps",
        "dt",
    ];
    const X: &'static str = "t_n";
    const PLOT: (&'static str, &'static [f64]) = ("d_n", &[0.0, 1.0]);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub grid: Grid2D,
    pub solver: Option<SolverConfig>,
    /// Lowest block of the homogeneous norms.
    pub j_min_homog: i32,
    pub version: String,
    /// The only field that differs between identical runs.
    pub wall_time_s: f64,
}

/// Result of re-running an experiment on a modified grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRun {
    pub label: String,
    pub grid_n: usize,
    pub domain_l: f64,
    /// Relative change `(variant - base) / |base|` of each headline quantity.
    pub relative_change: BTreeMap<String, f64>,
    /// Set instead of `relative_change` when the variant cannot be run.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Row")]
pub struct ExperimentReport<R: Row> {
    pub experiment: String,
    pub params: ConstructionParams,
    pub rows: Vec<R>,
    /// Derived scalars (fitted slopes, ratios); only finite values are stored.
    pub summary: BTreeMap<String, f64>,
    #[serde(default)]
    pub sensitivity: Vec<SensitivityRun>,
    pub metadata: Metadata,
}

impl<R: Row> ExperimentReport<R> {
    pub fn new(params: ConstructionParams, solver: Option<SolverConfig>, j_min_homog: i32) -> Self {
        Self {
            experiment: R::EXPERIMENT.to_string(),
            params,
            rows: Vec::new(),
            summary: BTreeMap::new(),
            sensitivity: Vec::new(),
            metadata: Metadata {
                grid: params.grid,
                solver,
                j_min_homog,
                version: VERSION.to_string(),
                wall_time_s: 0.0,
            },
        }
    }

    pub(crate) fn put(&mut self, key: &str, value: Option<f64>) {
        if let Some(v) = value.filter(|v| v.is_finite()) {
            self.summary.insert(key.to_string(), v);
        }
    }

    /// Values of a numeric column, `None` where a row has no value.
    pub fn column(&self, name: &str) -> Result<Vec<Option<f64>>> {
        if !R::COLUMNS.contains(&name) {
            return Err(HarnessError::UnknownColumn {
                column: name.to_string(),
                available: R::COLUMNS.join(", "),
            });
        }
        self.rows
            .iter()
            .map(|row| Ok(serde_json::to_value(row)?.get(name).and_then(|v| v.as_f64())))
            .collect()
    }
}

/// Least-squares slope of `log y` against `log x` over the positive pairs;
/// `None` with fewer than two usable points.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
