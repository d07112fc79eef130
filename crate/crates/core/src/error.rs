use thiserror::Error;

/// Errors raised by graph construction, embedding and model training.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeatherError {
    #[error("invalid weight {weight} on edge ({u}, {w})")]
    InvalidWeight { u: usize, w: usize, weight: f64 },

    #[error("node index {index} out of range for {num_nodes} nodes")]
    IndexOutOfRange { index: usize, num_nodes: usize },

    #[error("edge ({u}, {w}) listed with asymmetric weights {forward} and {backward}")]
    AsymmetricWeight {
        u: usize,
        w: usize,
        forward: f64,
        backward: f64,
    },

    #[error("requested {requested} edges but only {max} distinct edges exist on {n} nodes")]
    TooDense {
        n: usize,
        requested: usize,
        max: usize,
    },

    #[error("permutation is not a bijection on {0} nodes")]
    InvalidPermutation(usize),

    #[error("invalid evaluation domain [{lo}, {hi})")]
    InvalidDomain { lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("dense oracle limited to {max} nodes, got {num_nodes}")]
    OracleSizeExceeded { num_nodes: usize, max: usize },

    #[error("embedding has no rows")]
    EmptyEmbedding,

    #[error("training set is empty")]
    EmptyTrainSet,

    #[error("non-finite loss at epoch {epoch}")]
    DivergenceDetected { epoch: usize },

    #[error("model expects {expected} features, got {found}")]
    FeatureCountMismatch { expected: usize, found: usize },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for FeatherError {
    fn from(e: std::io::Error) -> Self {
        FeatherError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, FeatherError>;
