//! Pass/fail thresholds applied by `--check`. Defaults equal the acceptance
//! tolerances; any subset may be overridden from a TOML file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// `||div u0|| / ||grad u0||`.
    pub divergence: f64,
    /// Relative change of `||u0||_{B^s}` between truncations `J - 1` and `J`.
    pub besov_plateau: f64,
    /// `||Delta_{kn}(sum f . grad f)|| / ||u0 . grad u0||`.
    pub diagonal_residual: f64,
    /// Lower bound `r_n >= lower_bound_fraction * (17/12)^2 ||h4||` at the largest n.
    pub lower_bound_fraction: f64,
    /// `max r_n / min r_n` must stay below this.
    pub r_n_spread: f64,
    /// `(max - min) / min` of `||h4||` across n.
    pub h4_spread: f64,
    pub remainder_slope: [f64; 2],
    pub departure_slope: [f64; 2],
    /// `min_n D_n >= inflation_floor * D_{n_min}`.
    pub inflation_floor: f64,
    /// Contrast norm must shrink by at least this factor from the first to the last n.
    pub contrast_decay: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            divergence: 1e-12,
            besov_plateau: 0.05,
            diagonal_residual: 1e-8,
            lower_bound_fraction: 0.5,
            r_n_spread: 2.0,
            h4_spread: 0.10,
            remainder_slope: [1.8, 2.2],
            departure_slope: [0.9, 1.1],
            inflation_floor: 0.5,
            contrast_decay: 3.0,
        }
    }
}

impl Thresholds {
    pub fn from_toml_str(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|source| HarnessError::Thresholds {
            path: path.to_path_buf(),
            source,
        })
    }
}
