//! Counterparty-risk layer: adjustment rates, the semilinear source, the CRF
//! and without-provision solves, the fixed-point iteration for the value with
//! provision, bid/ask assembly and the fair forward price.

mod forward;
mod params;
mod problem;

pub use forward::{fair_forward_price, ForwardRoot, ForwardSetup};
pub use params::{PartyParams, MAX_COLLATERAL_RATIO};
pub use problem::{
    BidAsk, FixedPointSettings, InitialGuess, IterationReport, PricingProblem,
};

/// Which side of the trade is priced: the buyer's bid or the seller's ask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Buyer,
    Seller,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Buyer => "buyer",
            Side::Seller => "seller",
        }
    }
}

/// Aggregate adjustment rates for positive (`alpha`) and negative (`beta`) exposure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XvaCoefficients {
    pub alpha: f64,
    pub beta: f64,
    /// Sum of both parties' default intensities.
    pub lambda_counterparties: f64,
    /// Lipschitz constant of the source in its value argument.
    pub lipschitz_bound: f64,
}

impl XvaCoefficients {
    pub fn is_symmetric(&self) -> bool {
        (self.alpha - self.beta).abs() <= 1e-15
    }
}

/// `p1` is the buyer (party 1), `p2` the seller (party 2).
pub fn alpha_beta(p1: &PartyParams, p2: &PartyParams) -> XvaCoefficients {
    let pos = |v: f64| v.max(0.0);
    let alpha = p2.loss_rate * p2.intensity * pos(1.0 - p2.collateral_ratio)
        - p1.loss_rate * p1.intensity * pos(p2.collateral_ratio - 1.0)
        + p2.collateral_rate * p2.collateral_ratio;
    let beta = p1.loss_rate * p1.intensity * pos(1.0 - p1.collateral_ratio)
        - p2.loss_rate * p2.intensity * pos(p1.collateral_ratio - 1.0)
        + p1.collateral_rate * p1.collateral_ratio;
    let lambda = p1.intensity + p2.intensity;
    XvaCoefficients {
        alpha,
        beta,
        lambda_counterparties: lambda,
        lipschitz_bound: (lambda - beta).abs() + (beta - alpha).abs(),
    }
}

/// Semilinear source evaluated at value `y`; `base` is `h + lambda0 * l`.
///
/// The buyer uses `(beta - alpha) y^+`, the seller `-(beta - alpha) y^-`.
#[inline]
pub fn source_f(coeffs: &XvaCoefficients, base: f64, y: f64, side: Side) -> f64 {
    let linear = base + (coeffs.lambda_counterparties - coeffs.beta) * y;
    let gap = coeffs.beta - coeffs.alpha;
    match side {
        Side::Buyer => linear + gap * y.max(0.0),
        Side::Seller => linear - gap * (-y).max(0.0),
    }
}
