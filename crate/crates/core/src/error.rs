use thiserror::Error;

/// Errors raised across the crate.
///
/// [`Error::is_configuration`] separates user-side configuration mistakes
/// from numerical or solver failures; the CLI maps them to different exit
/// codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("radius mismatch: {left} km vs {right} km")]
    RadiusMismatch { left: f64, right: f64 },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("invalid count {got}: must be at least {min}")]
    InvalidCount { got: usize, min: usize },

    #[error("invalid inclination {0} rad: must lie strictly between 0 and pi/2")]
    InvalidInclination(f64),

    #[error("invalid angle {0} rad: must lie in [0, pi]")]
    InvalidAngle(f64),

    #[error("cardinality mismatch: source has {source_len} points, target has {target_len}")]
    CardinalityMismatch { source_len: usize, target_len: usize },

    #[error("problem size {n} exceeds the limit of {max} for this solver")]
    SizeLimit { n: usize, max: usize },

    #[error("invalid cost at ({row}, {col}): {value}")]
    InvalidCost { row: usize, col: usize, value: f64 },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid value for `{key}`: {reason}")]
    ConfigKey { key: String, reason: String },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::RadiusMismatch { .. }
                | Error::InvalidPoint(_)
                | Error::InsufficientPoints { .. }
                | Error::InvalidCount { .. }
                | Error::InvalidInclination(_)
                | Error::InvalidAngle(_)
                | Error::CardinalityMismatch { .. }
                | Error::SizeLimit { .. }
                | Error::Config(_)
                | Error::ConfigKey { .. }
                | Error::UnknownPreset(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
