use statrs::distribution::{ContinuousCDF, Normal};

use super::simpson;
use crate::claims::CallSpreadParams;
use crate::error::{invalid, PricingError, Result};
use crate::models::EquityModel;
use crate::numgrid::Surface;
use crate::xva::{alpha_beta, PartyParams, PricingProblem, Side};

/// Simpson subintervals for the forward time integral.
pub const FORWARD_INTERVALS: usize = 200;

fn std_normal_cdf(x: f64) -> f64 {
    // mean 0, sd 1 is always a valid parameterization
    Normal::new(0.0, 1.0).map(|n| n.cdf(x)).unwrap_or(f64::NAN)
}

/// Black-Scholes call on `s` at time `t`, maturity `maturity`, strike `strike`.
pub fn bs_call(t: f64, s: f64, maturity: f64, strike: f64, rate: f64, sigma: f64) -> f64 {
    let tau = maturity - t;
    if s <= 0.0 {
        return 0.0;
    }
    let disc_strike = strike * (-rate * tau).exp();
    if strike <= 0.0 {
        return s - disc_strike;
    }
    if tau <= 0.0 {
        return (s - strike).max(0.0);
    }
    let vol = sigma * tau.sqrt();
    let d1 = ((s / strike).ln() + (rate + 0.5 * sigma * sigma) * tau) / vol;
    let d2 = d1 - vol;
    s * std_normal_cdf(d1) - disc_strike * std_normal_cdf(d2)
}

/// CRF value of the call spread: two calls under the rate `r + lambda0` minus the discounted `m_lo`.
pub fn crf_call_spread(
    params: &CallSpreadParams,
    t: f64,
    s: f64,
    maturity: f64,
    r: f64,
    lambda0: f64,
    sigma: f64,
) -> f64 {
    let k_lo = params.strike - params.eps_lo;
    let k_hi = params.strike + params.eps_hi;
    let q = r + lambda0;
    params.slope() * (bs_call(t, s, maturity, k_lo, q, sigma) - bs_call(t, s, maturity, k_hi, q, sigma))
        - (-r * (maturity - t)).exp() * params.m_lo
}

fn constant_lambda0(model: &EquityModel) -> Result<f64> {
    model
        .ref_intensity
        .as_constant()
        .ok_or_else(|| invalid("lambda0", "closed forms need a constant reference intensity"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardPrices {
    pub crf: f64,
    pub bid: f64,
    pub ask: f64,
}

/// CRF, bid and ask of a long forward priced without provision.
///
/// The XVA is the time integral, by composite Simpson, of
/// `e^(-(l1 + l2)(u - t)) [(beta - alpha) C(t, s; u, K_u) - beta (s - e^(-l0 (u - t)) e^(-r (T - t)) F0)]`
/// for the bid, with `K_u = e^(-r (T - u)) F0` and `C` the call under the rate `r + l0`.
/// The ask swaps the roles of `alpha` and `beta`.
pub fn forward_prices_without_provision(
    f0: f64,
    t: f64,
    s: f64,
    maturity: f64,
    model: &EquityModel,
    buyer: &PartyParams,
    seller: &PartyParams,
) -> Result<ForwardPrices> {
    let l0 = constant_lambda0(model)?;
    let r = model.r;
    let x = alpha_beta(buyer, seller);
    let lambda = x.lambda_counterparties;
    let disc_f0 = (-r * (maturity - t)).exp() * f0;
    let crf = s - disc_f0;

    let leg = |u: f64, w_pos: f64, w_lin: f64| {
        let strike = (-r * (maturity - u)).exp() * f0;
        let call = bs_call(t, s, u, strike, r + l0, model.sigma);
        let linear = s - (-l0 * (u - t)).exp() * disc_f0;
        (-lambda * (u - t)).exp() * (w_pos * call - w_lin * linear)
    };
    let bid = crf
        + simpson(
            |u| leg(u, x.beta - x.alpha, x.beta),
            t,
            maturity,
            FORWARD_INTERVALS,
        );
    let ask = crf
        + simpson(
            |u| leg(u, x.alpha - x.beta, x.alpha),
            t,
            maturity,
            FORWARD_INTERVALS,
        );
    Ok(ForwardPrices { crf, bid, ask })
}

fn side_rate(buyer: &PartyParams, seller: &PartyParams, side: Side) -> f64 {
    let x = alpha_beta(buyer, seller);
    match side {
        Side::Buyer => x.alpha,
        Side::Seller => x.beta,
    }
}

/// European call with provision: the CRF call discounted at `alpha` (buyer) or `beta` (seller).
#[allow(clippy::too_many_arguments)]
pub fn call_with_provision(
    t: f64,
    s: f64,
    maturity: f64,
    strike: f64,
    model: &EquityModel,
    buyer: &PartyParams,
    seller: &PartyParams,
    side: Side,
) -> Result<f64> {
    let l0 = constant_lambda0(model)?;
    let a = side_rate(buyer, seller, side);
    Ok((-a * (maturity - t)).exp() * bs_call(t, s, maturity, strike, model.r + l0, model.sigma))
}

/// Multiplier `1 - a (1 - e^(-l tau)) / l` of the call without provision; tends to `1 - a tau` as `l -> 0`.
pub fn without_provision_multiplier(a: f64, lambda: f64, tau: f64) -> f64 {
    let weight = if (lambda * tau).abs() < 1e-12 {
        tau
    } else {
        -(-lambda * tau).exp_m1() / lambda
    };
    1.0 - a * weight
}

#[allow(clippy::too_many_arguments)]
pub fn call_without_provision(
    t: f64,
    s: f64,
    maturity: f64,
    strike: f64,
    model: &EquityModel,
    buyer: &PartyParams,
    seller: &PartyParams,
    side: Side,
) -> Result<f64> {
    let l0 = constant_lambda0(model)?;
    let a = side_rate(buyer, seller, side);
    let lambda = buyer.intensity + seller.intensity;
    Ok(without_provision_multiplier(a, lambda, maturity - t)
        * bs_call(t, s, maturity, strike, model.r + l0, model.sigma))
}

/// Prices of a claim with `g, h, l >= 0`, where the value function is linear.
///
/// With provision the discount is shifted by `alpha` (buyer) or `beta`
/// (seller); without provision the CRF value is reduced by the
/// correspondingly weighted integral of itself. Both are single linear solves.
pub fn positive_payoff_surface(problem: &PricingProblem, side: Side, provision: bool) -> Result<Surface> {
    if !problem.claim.nonnegative {
        return Err(PricingError::NegativePayoff);
    }
    if provision {
        problem.solve_shifted(side_rate(&problem.buyer, &problem.seller, side))
    } else {
        let crf = problem.solve_crf()?;
        problem.solve_without_provision(&crf, side)
    }
}

pub fn positive_payoff_price(
    problem: &PricingProblem,
    side: Side,
    provision: bool,
    t: f64,
    x: f64,
) -> Result<f64> {
    positive_payoff_surface(problem, side, provision)?.at_node(t, x)
}
