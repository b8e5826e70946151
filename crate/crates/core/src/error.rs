use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum SwedError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("positivity lost in cell {cell} at t = {time}: {what}")]
    PositivityLost { cell: usize, time: f64, what: String },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("report error: {0}")]
    Report(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SwedError>;
