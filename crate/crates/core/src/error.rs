//! Error type shared across the crate.

/// Errors raised by model construction, divergence evaluation and bound checks.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter lies outside the family's natural domain.
    #[error("parameter domain: {0}")]
    ParameterDomain(String),

    /// An invalid run configuration (grid sizes, caps, budgets).
    #[error("configuration: {0}")]
    Config(String),

    /// Vector/matrix sizes do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A likelihood ratio was requested without absolute continuity.
    #[error("domination violated: {0}")]
    Domination(String),

    /// Distributions from different families were mixed in one matrix.
    #[error("family mismatch: {0}")]
    FamilyMismatch(String),

    /// Estimator applied to an observation of the wrong arity.
    #[error("arity: {0}")]
    Arity(String),

    /// Requested operation has no implementation for this input.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Numerical validation failed (non-stochastic kernel, degenerate base, ...).
    #[error("validation: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
