use thiserror::Error;

/// Errors raised by the pricing engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PricingError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("zero pivot at row {row} (|pivot| = {pivot:e})")]
    ZeroPivot { row: usize, pivot: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("CIR factor evaluated at negative state x = {0}")]
    NegativeState(f64),

    #[error("Feller condition violated: 2*kappa*theta = {two_kappa_theta} <= sigma^2 = {sigma_sq}")]
    FellerViolation { two_kappa_theta: f64, sigma_sq: f64 },

    #[error("call spread slopes differ: m_lo/eps_lo = {lo}, m_hi/eps_hi = {hi}")]
    SlopeMismatch { lo: f64, hi: f64 },

    #[error("surface grid does not match the problem grid")]
    GridMismatch,

    #[error("fixed point did not converge in {iterations} iterations (last error {last_error:e}, tolerance {tolerance:e})")]
    NoConvergence {
        iterations: usize,
        last_error: f64,
        tolerance: f64,
    },

    #[error("root not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    NoBracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("claim is not certified to have a nonnegative payoff")]
    NegativePayoff,

    #[error("probe ({t}, {x}) is outside the grid")]
    ProbeOutsideGrid { t: f64, x: f64 },
}

pub type Result<T> = std::result::Result<T, PricingError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> PricingError {
    PricingError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
