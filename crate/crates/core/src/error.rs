use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Dimensions do not match what the operation requires.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A configured size guard would be exceeded.
    #[error("size limit exceeded: {0}")]
    Size(String),

    /// An argument lies outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input matrix is not Hermitian within the requested tolerance.
    #[error("not Hermitian: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    /// An iterative routine failed to reach its tolerance, or a computed
    /// quantity violates a contract it must satisfy.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Inputs that must agree with each other do not.
    #[error("inconsistent inputs: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
