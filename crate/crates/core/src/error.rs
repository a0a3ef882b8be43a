use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed CSV: {0}")]
    Format(String),

    #[error("line {line}: {message}")]
    Row { line: usize, message: String },

    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),

    #[error("series is empty")]
    EmptySeries,

    #[error("series too short: need at least {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("series has zero range, cannot rescale")]
    ZeroRange,

    #[error("integration head has length {got}, expected {expected}")]
    HeadLength { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("optimizer did not converge after {iterations} iterations (best objective {best_objective})")]
    Convergence {
        iterations: usize,
        best_objective: f64,
        best_coefficients: Vec<f64>,
    },

    #[error("order selection failed: {0}")]
    Selection(String),

    #[error("training diverged (non-finite loss) at epoch {epoch}")]
    Divergence { epoch: usize },

    #[error("report `{label}` has no `{metric}` value")]
    MetricMissing { label: String, metric: String },

    #[error("cannot rank MSE across units {0:?} without price-unit MSE on every report")]
    MixedUnits(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
