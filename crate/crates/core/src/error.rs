use std::path::PathBuf;

/// Errors produced anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("infeasible clipped simplex: dimension {dimension}, floor {floor}")]
    InfeasibleDomain { dimension: usize, floor: f64 },

    #[error("degenerate pre-projection point")]
    DegenerateProjection,

    #[error("projection bracket failure: {0}")]
    BracketFailure(String),

    #[error("estimator overflow: non-finite loss estimate at coordinate {index}")]
    EstimatorOverflow { index: usize },

    #[error("floor violation: probability {prob:e} below floor {floor:e}")]
    FloorViolation { prob: f64, floor: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("horizon too small: T = {0}, need T >= 2")]
    HorizonTooSmall(usize),

    #[error("parameters infeasible for this T,K: {0}")]
    InfeasibleParameters(String),

    #[error("loss {loss} for arm {arm} at step {t} is outside [0, 1]")]
    LossOutOfRange { t: usize, arm: usize, loss: f64 },

    #[error("invalid pattern name `{0}`")]
    InvalidPattern(String),

    #[error("parse error at row {row}, column {column}: {reason}")]
    Parse { row: usize, column: usize, reason: String },

    #[error("entry out of range at row {row}, column {column}: {value} is outside [0, 1]")]
    EntryOutOfRange { row: usize, column: usize, value: f64 },

    #[error("loss table has {got} rows/columns where {expected} were declared ({what})")]
    ShapeMismatch { what: &'static str, expected: usize, got: usize },

    #[error("instance too large for exhaustive enumeration: {0} sequences")]
    InstanceTooLarge(f64),

    #[error("trace mismatch: {0}")]
    TraceMismatch(String),

    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config { field: field.into(), reason: reason.into() }
    }

    /// Whether the error stems from user configuration (as opposed to a numeric or runtime failure).
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::InvalidParameter { .. }
                | Error::HorizonTooSmall(_)
                | Error::InfeasibleParameters(_)
                | Error::InvalidPattern(_)
                | Error::InfeasibleDomain { .. }
                | Error::Parse { .. }
                | Error::EntryOutOfRange { .. }
                | Error::ShapeMismatch { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
