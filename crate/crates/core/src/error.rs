use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite entries in {0}")]
    NonFinite(&'static str),

    #[error("{0} is not positive definite")]
    Singular(&'static str),

    #[error("scenario infeasible (margin {margin:.3e} W)")]
    Infeasible { margin: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("matrix is not numerically rank one (lambda2/lambda1 = {ratio:.3e})")]
    Rank { ratio: f64 },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("linearized energy-harvesting constraint is unreachable (H_E V = 0)")]
    UnreachableLinearization,

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
