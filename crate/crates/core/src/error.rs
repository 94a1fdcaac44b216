use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An index or coordinate fell outside its valid range.
    #[error("range error: {0}")]
    Range(String),
    /// A submove or action that the current state does not allow.
    #[error("illegal move: {0}")]
    Illegal(String),
    /// An operation was called outside its precondition (e.g. on a finished game).
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// Non-finite values surfaced during training.
    #[error("training error: {0}")]
    Training(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("checkpoint format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
