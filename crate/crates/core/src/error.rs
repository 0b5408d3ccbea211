use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("integral diverges: term with (1+z) exponent {c} is not integrable over the pyramid")]
    Divergent { c: i64 },
    #[error("evaluation at the apex hits a pole of 1/(1-zeta)")]
    Singular,
    #[error("degenerate pyramid: Jacobian determinant is zero")]
    Degenerate,
    #[error("invalid order {0}: orders start at 1")]
    InvalidOrder(i64),
    #[error("exterior derivative of a {0}-form is not defined in three dimensions")]
    Degree(usize),
    #[error("polynomial degree {got} exceeds the allowed {max}")]
    DegreeTooHigh { got: usize, max: usize },
    #[error("form is not a member of the requested space")]
    NotInSpace,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("eigenvalue iteration did not converge")]
    Convergence,
    #[error("constraint system is singular")]
    SingularSystem,
    #[error("mesh is not conforming: {0}")]
    NonconformingMesh(String),
    #[error("system matrix is not positive definite")]
    Indefinite,
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
