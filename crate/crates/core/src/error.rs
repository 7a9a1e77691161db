//! Error taxonomy shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument left the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A function was fed into a parity-restricted operator it does not belong to.
    #[error("parity error: {0}")]
    Parity(String),

    /// An extension-specific constraint (k-range, m bound, m even) was violated.
    #[error("admissibility error: {0}")]
    Admissibility(String),

    /// A seed or denominator has a zero inside the physical domain, or its
    /// sign-definiteness could not be certified.
    #[error("singular extension: {0}")]
    SingularExtension(String),

    /// The ansatz linear system did not have a certified one-dimensional kernel.
    #[error("nullspace dimension {dim}, expected 1 ({context})")]
    NullspaceDimension { dim: usize, context: String },

    /// Parameters that collapse the construction identically (e.g. A = B).
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    /// A numerical kernel (eigensolver, quadrature self-test) failed.
    #[error("construction error: {0}")]
    Construction(String),

    /// A finite-difference stencil would leave the admissible domain.
    #[error("stencil domain error: {0}")]
    StencilDomain(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
