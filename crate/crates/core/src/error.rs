//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },

    #[error("missing column '{0}'")]
    MissingColumn(String),

    #[error("feature '{0}' is constant (zero variance)")]
    DegenerateFeature(String),

    #[error("intercept column already present")]
    InterceptAlreadyPresent,

    #[error("split fractions must be positive and sum to 1, got {0:?}")]
    InvalidFractions(Vec<f64>),

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("invalid cluster count k={k} for n={n}")]
    InvalidK { k: usize, n: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("every cluster falls below the minimum size {0}")]
    AllClustersDropped(usize),

    #[error("dataset has no labels")]
    LabelMissing,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("label {label} outside 1..={n_classes}")]
    BadLabel { label: usize, n_classes: usize },

    #[error("feature set may not contain the intercept coordinate")]
    InterceptInFeatureSet,

    #[error("feature set is empty")]
    EmptyFeatureSet,

    #[error("invalid counts: n_pos={n_pos}, n={n}")]
    InvalidCounts { n_pos: usize, n: usize },

    #[error("too few samples: {got} < {min}")]
    TooFewSamples { got: usize, min: usize },

    #[error("unknown cluster {0}")]
    UnknownCluster(usize),

    #[error("missing file: {0}")]
    MissingFile(String),

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
