use thiserror::Error;

/// Errors raised for malformed inputs. Non-convergence and divergence of a Newton run are
/// reported through [`crate::newton::Status`], not through this type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("singular matrix: zero pivot in column {column}")]
    Singular { column: usize },
    #[error("every line-search sample was non-finite")]
    NonFiniteSamples,
}

pub type Result<T> = std::result::Result<T, Error>;
