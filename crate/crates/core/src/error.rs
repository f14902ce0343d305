use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("scale beyond stored precision: r = {scale}, p = {precision}")]
    ScaleBeyondPrecision { scale: u32, precision: u32 },

    #[error("diameter of empty set")]
    EmptyDiameter,

    #[error("empty point set")]
    EmptySet,

    #[error("product too large: {required} points exceeds cap {cap}")]
    ProductTooLarge { required: u128, cap: u64 },

    #[error("coordinate leaves the bounded workspace (|x| <= 2^31 * 2^-p)")]
    WorkspaceOverflow,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("precision mismatch: {0} vs {1}")]
    PrecisionMismatch(u32, u32),

    #[error("ambient dimension {0} outside 1..=4")]
    BadDimension(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("attractor needs {required} points, cap is {cap}")]
    CapExceeded { required: u128, cap: u64 },

    #[error("normalize to unit cube first")]
    NotNormalized,

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid file format: {0}")]
    Format(String),

    #[error("calibration: {0}")]
    Calibration(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
