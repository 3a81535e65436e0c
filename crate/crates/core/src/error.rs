//! Crate-wide error type. Variants mirror the failure modes of the
//! individual operations so callers can match on exactly what went wrong.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("measure is purely atomic and has no density")]
    AtomicMeasure,
    #[error("argument must lie in the open upper half-plane (Im z > 0)")]
    LowerHalfPlane,
    #[error("no closed-form R-transform for this measure")]
    NoClosedForm,
    #[error("R-transform pole at w = {0}")]
    PoleAt(f64),
    #[error("Cauchy transform vanished; H(z) = 1/G - z is undefined")]
    ZeroCauchy,
    #[error("invalid measure parameter: {0}")]
    InvalidMeasure(String),
    #[error("fixed point did not converge: {iterations} iterations, residual {residual:e}")]
    NoConvergence { iterations: u32, residual: f64 },
    #[error("curve grids are incompatible: {0}")]
    GridMismatch(String),
    #[error("unsupported perturbation order {0}")]
    UnsupportedOrder(u32),
    #[error("analytic derivative unavailable for this base measure")]
    DerivativeUnavailable,
    #[error("first-order compression requires theta in [0, 1); got {0}")]
    ThetaOutOfRange(f64),
    #[error("fixed-point argument left the upper half-plane (clamp budget exceeded)")]
    LeftUpperHalfPlane,
    #[error("PDE stencil evaluation failed: {0}")]
    StencilFailure(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("fourth-moment denominator consistent with zero: {denom:e} vs stderr {stderr:e}")]
    DenominatorNearZero { denom: f64, stderr: f64 },
    #[error("interpolation weight p = {0} outside [0, 1]")]
    POutOfRange(f64),
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("eigenvalue iteration failed to converge at index {0}")]
    NoConvergenceEig(usize),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
