//! Crate-wide error type.

/// Errors reported by `qhgeo` operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A precondition `x ∈ Ω` was violated.
    #[error("point lies outside the domain (or on its boundary)")]
    OutsideDomain,

    /// No strictly interior point could be certified for a polytope.
    #[error("polytope has empty interior: no strictly interior point found")]
    EmptyInterior,

    /// The grid solver found no feasible path at the requested resolution.
    #[error("endpoints are disconnected at grid spacing {spacing}")]
    Disconnected { spacing: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
