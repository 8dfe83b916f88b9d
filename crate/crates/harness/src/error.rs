use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] besov_core::Error),
    #[error("solver failed at t = {t}: {source}")]
    Solver {
        t: f64,
        #[source]
        source: besov_core::Error,
    },
    #[error("invalid experiment input `{field}`: {message}")]
    Input { field: &'static str, message: String },
    #[error("unknown column `{column}`; available: {available}")]
    UnknownColumn { column: String, available: String },
    #[error("cannot plot `{0}`: no positive values for logarithmic axes")]
    NothingToPlot(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("threshold file {path}: {source}")]
    Thresholds {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

pub(crate) fn input(field: &'static str, message: impl Into<String>) -> HarnessError {
    HarnessError::Input {
        field,
        message: message.into(),
    }
}
