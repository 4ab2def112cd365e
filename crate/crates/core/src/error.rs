use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state space too large: {what} needs {needed} entries, cap is {cap}")]
    Capacity {
        what: &'static str,
        needed: String,
        cap: u64,
    },

    #[error("relations live on different state spaces")]
    SpaceMismatch,

    #[error("{0} is not deterministic; relative correctness is only defined for deterministic programs")]
    NonDeterministic(&'static str),

    #[error("invalid state space: {0}")]
    InvalidSpace(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("undeclared variable `{0}`")]
    Undeclared(String),

    #[error("invalid specification: {0}")]
    Spec(String),

    #[error("no test inputs: {0}")]
    EmptySuite(String),

    #[error("invalid patch: {0}")]
    Patch(String),

    #[error("malformed document: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
