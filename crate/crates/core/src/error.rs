use thiserror::Error;

/// Errors produced by the library.
///
/// The variants are grouped by how a caller should react: `InvalidInput`
/// means the arguments can never make sense (bad exponent, empty budget,
/// mismatched dimensions), while `Boundary` and `Guard` flag requests that
/// are well-formed but fall outside what the implemented asymptotics or the
/// desk-scale exact algorithms cover.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Malformed arguments: bad exponent values, empty budgets, dimension
    /// mismatches, unparseable input.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A strict inequality that selects a regime sits inside the guard band,
    /// or a parameter set falls into a limiting case that no implemented
    /// regime covers.
    #[error("boundary or uncovered regime: {0}")]
    Boundary(String),

    /// A desk-scale cap was exceeded (matrix too large, block too large,
    /// integration grid too deep).
    #[error("desk-scale guard: {0}")]
    Guard(String),
}

impl CoreError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CoreError::InvalidInput(msg.into())
    }

    pub fn boundary(msg: impl Into<String>) -> Self {
        CoreError::Boundary(msg.into())
    }

    pub fn guard(msg: impl Into<String>) -> Self {
        CoreError::Guard(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;

pub(crate) fn invalid(msg: impl Into<String>) -> CoreError {
    CoreError::invalid(msg)
}

pub(crate) fn boundary(msg: impl Into<String>) -> CoreError {
    CoreError::boundary(msg)
}

pub(crate) fn guard(msg: impl Into<String>) -> CoreError {
    CoreError::guard(msg)
}
