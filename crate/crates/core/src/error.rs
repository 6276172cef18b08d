use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported spin s = {0}/2 (supported: 1/2 and 1)")]
    UnsupportedSpin(u32),

    #[error("tensor is not antisymmetric (|T + T^t| = {0:.3e})")]
    NotAntisymmetric(f64),

    #[error("lambda must be nonzero")]
    ZeroLambda,

    #[error("momentum is not timelike (p^2 = {0:.6e})")]
    NonTimelike(f64),

    #[error("spinor dimension {found} does not match representation dimension {expected}")]
    SpinorDimension { expected: usize, found: usize },

    #[error("algebra check '{check}' failed: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    AlgebraViolation {
        check: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("eigenbasis is ill-conditioned (cond = {0:.3e})")]
    DegenerateOperator(f64),

    #[error("momentum varies across trajectory samples (max drift {0:.3e})")]
    InconsistentMomentum(f64),

    #[error("integration became non-finite at tau = {0}")]
    StepUnstable(f64),

    #[error("invalid configuration: {0}")]
    BadConfig(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
