use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("index {index} out of range for dimension {dim}")]
    Index { index: usize, dim: usize },
    #[error("atom {atom} out of range ({atoms} atoms)")]
    Atom { atom: usize, atoms: usize },
    #[error("symbolic elements are not supported here: {0}")]
    UnsupportedSymbolic(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("capacity exceeded: {0}")]
    CapExceeded(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
