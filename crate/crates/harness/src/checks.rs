//! Threshold checks applied to finished reports (`--check`).

use serde::{Deserialize, Serialize};

use crate::report::{ExperimentReport, InflationRow, LemmaRow, RemainderRow};
use crate::thresholds::Thresholds;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Human-readable bound the value must satisfy.
    pub requirement: String,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, max: f64) -> Self {
        Self {
            name: name.into(),
            value,
            requirement: format!("<= {max:e}"),
            passed: value <= max,
        }
    }

    fn at_least(name: &str, value: f64, min: f64) -> Self {
        Self {
            name: name.into(),
            value,
            requirement: format!(">= {min}"),
            passed: value >= min,
        }
    }

    fn within(name: &str, value: Option<f64>, [lo, hi]: [f64; 2]) -> Self {
        let v = value.unwrap_or(f64::NAN);
        Self {
            name: name.into(),
            value: v,
            requirement: format!("in [{lo}, {hi}]"),
            passed: (lo..=hi).contains(&v),
        }
    }

    fn missing(name: &str) -> Self {
        Self {
            name: name.into(),
            value: f64::NAN,
            requirement: "needs at least one row".into(),
            passed: false,
        }
    }

    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("{tag} {}: {:e} (required {})", self.name, self.value, self.requirement)
    }
}

fn max_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::INFINITY, f64::min)
}

pub fn check_lemma(report: &ExperimentReport<LemmaRow>, thr: &Thresholds) -> Vec<Check> {
    let rows = &report.rows;
    let Some(last) = rows.iter().max_by_key(|r| r.n) else {
        return vec![Check::missing("verify_lemma")];
    };
    let mut out = vec![
        Check::at_most("divergence_residual", max_of(rows.iter().map(|r| r.div_residual)), thr.divergence),
        Check::at_most("diagonal_residual", max_of(rows.iter().map(|r| r.diag_residual)), thr.diagonal_residual),
        Check::at_least("lower_bound_ratio", last.bound_ratio, thr.lower_bound_fraction),
    ];
    let r_max = max_of(rows.iter().map(|r| r.r_n));
    let r_min = min_of(rows.iter().map(|r| r.r_n));
    out.push(Check {
        name: "r_n_spread".into(),
        value: r_max / r_min,
        requirement: format!("< {}", thr.r_n_spread),
        passed: r_max / r_min < thr.r_n_spread,
    });
    let h_max = max_of(rows.iter().map(|r| r.h4_norm));
    let h_min = min_of(rows.iter().map(|r| r.h4_norm));
    out.push(Check::at_most("h4_spread", (h_max - h_min) / h_min, thr.h4_spread));
    if let Some(change) = report.summary.get("besov_plateau_change") {
        out.push(Check::at_most("besov_plateau_change", *change, thr.besov_plateau));
    }
    out
}

pub fn check_remainder(report: &ExperimentReport<RemainderRow>, thr: &Thresholds) -> Vec<Check> {
    vec![
        Check::within("remainder_slope", report.summary.get("remainder_slope").copied(), thr.remainder_slope),
        Check::within("departure_slope", report.summary.get("departure_slope").copied(), thr.departure_slope),
    ]
}

pub fn check_inflation(report: &ExperimentReport<InflationRow>, thr: &Thresholds) -> Vec<Check> {
    match (report.summary.get("inflation_ratio"), report.summary.get("contrast_decay")) {
        (Some(ratio), Some(decay)) => vec![
            Check::at_least("inflation_ratio", *ratio, thr.inflation_floor),
            Check::at_least("contrast_decay", *decay, thr.contrast_decay),
        ],
        _ => vec![Check::missing("inflation")],
    }
}
