use thiserror::Error;

/// Error type shared by all analysis modules.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("partial derivative of rate `{reaction}` w.r.t. `{species}` is not sign-definite over the parameter box")]
    NotSignDefinite { reaction: String, species: String },
    #[error("refused: {0}")]
    Refused(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
