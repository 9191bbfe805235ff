use super::{FixedPointSettings, PartyParams, PricingProblem, Side};
use crate::claims::equity_forward;
use crate::error::{invalid, PricingError, Result};
use crate::models::{Dynamics, EquityModel};
use crate::numgrid::GridSpec;

const BRACKET_WIDTH: f64 = 1e-8;
const MAX_WIDENINGS: usize = 8;

/// Inputs for the forward price that zeroes the value with provision at inception.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardSetup {
    pub model: EquityModel,
    pub buyer: PartyParams,
    pub seller: PartyParams,
    pub spot: f64,
    pub maturity: f64,
    pub grid: GridSpec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardRoot {
    pub forward: f64,
    /// Value with provision at `(0, spot)` for the returned forward price.
    pub residual: f64,
    pub evaluations: usize,
}

impl ForwardSetup {
    /// Value with provision at `(0, spot)` for the strike `f0`.
    pub fn value(&self, f0: f64, side: Side, settings: &FixedPointSettings) -> Result<f64> {
        let problem = PricingProblem::new(
            Dynamics::Equity(self.model),
            equity_forward(f0, self.maturity, self.model.r)?,
            self.buyer,
            self.seller,
            self.grid,
        )?;
        let (surface, _) = problem.solve_with_provision(side, settings)?;
        surface.at_node(0.0, self.spot)
    }
}

/// Bisection on the forward price until the bracket is narrower than `1e-8`.
///
/// The search starts from `[0.5, 1.5] * e^(rT) S0` and widens the bracket
/// when both ends share a sign.
pub fn fair_forward_price(
    setup: &ForwardSetup,
    side: Side,
    settings: &FixedPointSettings,
) -> Result<ForwardRoot> {
    if !(setup.spot.is_finite() && setup.spot > 0.0) {
        return Err(invalid("spot", format!("{} must be > 0", setup.spot)));
    }
    if setup.grid.node_index(setup.spot).is_none() {
        return Err(PricingError::ProbeOutsideGrid {
            t: 0.0,
            x: setup.spot,
        });
    }
    let centre = (setup.model.r * setup.maturity).exp() * setup.spot;
    let mut evaluations = 0;
    let mut eval = |f0: f64| {
        evaluations += 1;
        setup.value(f0, side, settings)
    };

    let (mut lo, mut hi) = (0.5 * centre, 1.5 * centre);
    let (mut f_lo, mut f_hi) = (eval(lo)?, eval(hi)?);
    let mut widenings = 0;
    while f_lo.signum() == f_hi.signum() && f_lo != 0.0 && f_hi != 0.0 {
        if widenings == MAX_WIDENINGS {
            return Err(PricingError::NoBracket {
                lo,
                hi,
                f_lo,
                f_hi,
            });
        }
        widenings += 1;
        let span = hi - lo;
        lo = (lo - span).max(1e-12 * centre);
        hi += span;
        f_lo = eval(lo)?;
        f_hi = eval(hi)?;
    }
    if f_lo == 0.0 {
        return Ok(ForwardRoot {
            forward: lo,
            residual: 0.0,
            evaluations,
        });
    }
    if f_hi == 0.0 {
        return Ok(ForwardRoot {
            forward: hi,
            residual: 0.0,
            evaluations,
        });
    }

    while hi - lo > BRACKET_WIDTH {
        let mid = 0.5 * (lo + hi);
        let f_mid = eval(mid)?;
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let forward = 0.5 * (lo + hi);
    let residual = eval(forward)?;
    Ok(ForwardRoot {
        forward,
        residual,
        evaluations,
    })
}
