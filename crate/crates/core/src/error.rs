use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{n} qubits exceeds the limit of {max} for this operation")]
    TooManyQubits { n: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("operator is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("Kraus set is not complete (deviation {0:.3e})")]
    IncompleteKraus(f64),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("matrix is not a generalized inverse of T (residual {0:.3e})")]
    NotGeneralizedInverse(f64),

    #[error("sites {0} and {1} are not adjacent")]
    NonAdjacent(usize, usize),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("layer {layer} uses qubit {qubit} more than once")]
    OverlappingGates { layer: usize, qubit: usize },

    #[error("circuit has no recognized overlap-test role")]
    UnrecognizedCircuit,

    #[error("empty sample record")]
    EmptyRecord,

    #[error("sample records were taken with different POVMs or qubit counts")]
    RecordMismatch,

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
