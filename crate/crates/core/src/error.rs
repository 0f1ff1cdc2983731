use crate::base::Cx;
use thiserror::Error;

/// Errors raised by the operator toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite parameter: {0}")]
    NonFinite(&'static str),

    #[error("value out of floating-point range while evaluating {0}")]
    Range(&'static str),

    #[error("symbol is a translation (a = 1, b = {b}): no finite fixed point")]
    NoFixedPoint { b: Cx },

    #[error("weight inconsistent with the forced kernel form u(0)K_(-conj(a)b): expected kernel index {expected}, got {found}")]
    KernelIndexMismatch { expected: Cx, found: Cx },

    #[error("operation requires regime {expected}, found {found}")]
    WrongRegime {
        expected: &'static str,
        found: &'static str,
    },

    #[error("infinite product diverges: u(z0) = {value} is not 1")]
    ProductDiverges { value: Cx },

    #[error("branch mismatch: log u(z0) = {exponent} is a nonzero multiple of 2*pi*i")]
    BranchMismatch { exponent: Cx },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("spectrum not covered: {0}")]
    NotCovered(String),

    #[error("power iteration did not converge after {iterations} iterations (last estimate {estimate})")]
    NoConvergence { iterations: usize, estimate: f64 },

    #[error("truncated series unreliable at radius {radius}: raise the degree or shrink the radius")]
    TruncationUnreliable { radius: f64 },

    #[error("invalid matrix dimension {0}")]
    Dimension(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
