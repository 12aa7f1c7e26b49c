use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure classes shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid `{field}`: {reason}")]
    Validation { field: &'static str, reason: String },

    #[error("degenerate coupling: g1 and g-1 are both zero, no beating is possible")]
    DegenerateCoupling,

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("truncation: {what} mass {mass:.3e} is not below tolerance {tolerance:.1e}")]
    Truncation {
        what: &'static str,
        mass: f64,
        tolerance: f64,
    },

    #[error("unsupported moment: {0}")]
    UnsupportedMoment(String),

    #[error("moment order {order} exceeds the tracked maximum {n_top}")]
    Order { order: usize, n_top: usize },

    #[error("correlation undefined: mean photon number is zero")]
    UndefinedCorrelation,

    #[error("normalized squeezing undefined for the {0} mode: mean photon number is zero")]
    UndefinedNormalization(crate::Mode),

    #[error("basis mismatch: operator built for n_max = {operator}, state uses n_max = {state}")]
    BasisMismatch { operator: usize, state: usize },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("verification failed: {0}")]
    Verification(String),
}

impl Error {
    /// Process exit status: 1 config/validation, 2 resource/truncation/I/O,
    /// 3 verification failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource(_) | Error::Truncation { .. } | Error::Io { .. } => 2,
            Error::Verification(_) => 3,
            _ => 1,
        }
    }

    pub(crate) fn validation(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
