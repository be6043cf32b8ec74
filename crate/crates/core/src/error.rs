use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("malformed complex: {0}")]
    MalformedComplex(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("malformed tree: {0}")]
    MalformedTree(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("invalid extension: {0}")]
    InvalidExtension(String),
    #[error("not unitary: {0}")]
    NotUnitary(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
