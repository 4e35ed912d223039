use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("row {row} sums to {sum}, expected 1")]
    RowSumViolation { row: usize, sum: f64 },

    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric: |m[{row},{col}] - m[{col},{row}]| = {diff}")]
    NotSymmetric { row: usize, col: usize, diff: f64 },

    #[error("index {index} out of range for universe of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("duplicate index {0} in marked set")]
    DuplicateIndex(usize),

    #[error("marked set is empty")]
    EmptyMarkedSet,

    #[error("size {size} exceeds cap {cap}")]
    TooLarge { size: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("system {system} is not orthonormal: <v{i}, v{j}> = {value}")]
    NotOrthonormal { system: &'static str, i: usize, j: usize, value: f64 },

    #[error("eigensolver failure: {0}")]
    EigensolverFailure(String),

    #[error("eigenvalue gap is zero; the detection range is unbounded")]
    DegenerateGap,

    #[error("no hit within K <= {0}")]
    NoHitWithinCap(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short stable identifier, used for machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonFinite { .. } => "NonFinite",
            Error::NegativeEntry { .. } => "NegativeEntry",
            Error::RowSumViolation { .. } => "RowSumViolation",
            Error::NotSquare { .. } => "NotSquare",
            Error::NotSymmetric { .. } => "NotSymmetric",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::DuplicateIndex(_) => "DuplicateIndex",
            Error::EmptyMarkedSet => "EmptyMarkedSet",
            Error::TooLarge { .. } => "TooLarge",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NotOrthonormal { .. } => "NotOrthonormal",
            Error::EigensolverFailure(_) => "EigensolverFailure",
            Error::DegenerateGap => "DegenerateGap",
            Error::NoHitWithinCap(_) => "NoHitWithinCap",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
            Error::Csv(_) => "Csv",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
