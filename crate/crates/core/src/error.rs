use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is outside the supported range {min}..={max}")]
    OutOfBounds {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("multi-index target has order zero")]
    EmptyTarget,

    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("block types differ: {source_type} vs {target_type}")]
    IncompatibleType {
        source_type: String,
        target_type: String,
    },

    #[error("algebra consistency failure: {0}")]
    AlgebraConsistency(String),

    #[error("insufficient sample: expression needs at least {required} rows, data has {actual}")]
    InsufficientSample { required: usize, actual: usize },

    #[error("csv error at row {row}, column {column}: {message}")]
    Csv {
        row: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
