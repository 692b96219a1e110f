use thiserror::Error;

/// Errors raised by data construction, stage primitives and estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("feature index {index} out of range for {len} features")]
    FeatureIndex { index: usize, len: usize },

    #[error("observation index {index} out of range for {len} rows")]
    RowIndex { index: usize, len: usize },

    #[error("invalid level {level} for categorical feature `{feature}`")]
    InvalidLevel { feature: String, level: String },

    #[error("feature `{feature}` is {kind}; {operation} requires a continuous feature")]
    UnsupportedKind {
        feature: String,
        kind: &'static str,
        operation: &'static str,
    },

    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: String, actual: String },

    #[error("dataset has no target column")]
    MissingTarget,

    #[error("missing or non-finite value at row {row}, column {column}")]
    MissingValue { row: usize, column: usize },

    #[error("invalid dataset: {0}")]
    InvalidData(String),

    #[error("degenerate binning: {0}")]
    DegenerateBinning(String),

    #[error("{features} features exceed the exact enumeration cap of {cap}; use the Monte Carlo estimator")]
    Capacity { features: usize, cap: usize },

    #[error("singular least-squares design: {0}")]
    SingularFit(String),

    #[error("standard deviation undefined for fewer than two observations")]
    UndefinedVariance,

    #[error("stage `{stage}` recorded after a later stage")]
    TraceOrder { stage: &'static str },

    #[error("model format: {0}")]
    ModelFormat(String),
}

/// Coarse classification used by front-ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Numeric,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidArgument(_) | Error::FeatureIndex { .. } | Error::RowIndex { .. } => {
                ErrorClass::Usage
            }
            Error::InvalidLevel { .. }
            | Error::UnsupportedKind { .. }
            | Error::Shape { .. }
            | Error::MissingTarget
            | Error::MissingValue { .. }
            | Error::InvalidData(_)
            | Error::ModelFormat(_) => ErrorClass::Data,
            Error::DegenerateBinning(_)
            | Error::Capacity { .. }
            | Error::SingularFit(_)
            | Error::UndefinedVariance
            | Error::TraceOrder { .. } => ErrorClass::Numeric,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
