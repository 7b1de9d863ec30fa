use thiserror::Error;

/// Errors produced by the measure, mean and solver routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error(
        "quadrature did not converge on [{lo}, {hi}] after {subdivisions} subdivisions \
         (partial estimate {partial}, error estimate {error_estimate})"
    )]
    Quadrature {
        lo: f64,
        hi: f64,
        partial: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("integrability check failed on the {tail} tail: remainder bound {bound} exceeds {tolerance}")]
    Integrability {
        tail: &'static str,
        bound: f64,
        tolerance: f64,
    },

    #[error("infeasible target for observable {observable}: {target} not strictly inside [{min}, {max}]")]
    Infeasible {
        observable: usize,
        target: f64,
        min: f64,
        max: f64,
    },

    #[error("dual variables diverged (|beta| = {beta_norm}) with gradient norm {gradient_norm}: target lies on or outside the attainable moment set")]
    DualDivergence { beta_norm: f64, gradient_norm: f64 },

    #[error("observable {observable} is linearly dependent on the constant and the preceding observables")]
    Redundant { observable: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian: max |A - A*| = {deviation}")]
    NotHermitian { deviation: f64 },

    #[error("sampling not supported: {0}")]
    Sampling(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
