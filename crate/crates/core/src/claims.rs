//! Payoff triplets `(g, h, l)`: terminal payoff, dividend rate and the amount
//! paid at the reference default.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, PricingError, Result};

pub type TerminalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type FlowFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct ClaimTriplet {
    /// `g(x)` paid at maturity.
    pub terminal: TerminalFn,
    /// `h(t, x)`, cash rate per year.
    pub dividend: FlowFn,
    /// `l(t, x)`, paid at the reference default.
    pub at_default: FlowFn,
    pub maturity: f64,
    /// Set when `g, h, l >= 0` is known to hold everywhere.
    pub nonnegative: bool,
    pub note: Option<&'static str>,
}

impl fmt::Debug for ClaimTriplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClaimTriplet")
            .field("maturity", &self.maturity)
            .field("nonnegative", &self.nonnegative)
            .field("note", &self.note)
            .finish_non_exhaustive()
    }
}

impl ClaimTriplet {
    pub fn new(
        terminal: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dividend: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        at_default: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        maturity: f64,
    ) -> Result<Self> {
        check_maturity(maturity)?;
        Ok(Self {
            terminal: Arc::new(terminal),
            dividend: Arc::new(dividend),
            at_default: Arc::new(at_default),
            maturity,
            nonnegative: false,
            note: None,
        })
    }

    pub fn g(&self, x: f64) -> f64 {
        (self.terminal)(x)
    }

    pub fn h(&self, t: f64, x: f64) -> f64 {
        (self.dividend)(t, x)
    }

    pub fn l(&self, t: f64, x: f64) -> f64 {
        (self.at_default)(t, x)
    }
}

fn check_maturity(maturity: f64) -> Result<()> {
    if !(maturity.is_finite() && maturity > 0.0) {
        return Err(invalid("maturity", format!("{maturity} must be > 0")));
    }
    Ok(())
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(invalid(name, format!("{v} must be > 0")));
    }
    Ok(())
}

/// Long `m_lo` digital-like spread around `strike`:
/// `-m_lo` below `K - eps_lo`, `m_hi` above `K + eps_hi`, linear in between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CallSpreadParams {
    pub strike: f64,
    pub eps_lo: f64,
    pub eps_hi: f64,
    pub m_lo: f64,
    pub m_hi: f64,
}

impl CallSpreadParams {
    /// Symmetric spread `eps_lo = eps_hi = eps`, `m_lo = m_hi = m`.
    pub fn symmetric(strike: f64, eps: f64, m: f64) -> Self {
        Self {
            strike,
            eps_lo: eps,
            eps_hi: eps,
            m_lo: m,
            m_hi: m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("strike", self.strike)?;
        check_positive("eps_lo", self.eps_lo)?;
        check_positive("eps_hi", self.eps_hi)?;
        check_positive("m_lo", self.m_lo)?;
        check_positive("m_hi", self.m_hi)?;
        let (lo, hi) = (self.m_lo / self.eps_lo, self.m_hi / self.eps_hi);
        if (lo - hi).abs() > 1e-12 {
            return Err(PricingError::SlopeMismatch { lo, hi });
        }
        Ok(())
    }

    /// Common slope of the linear segment.
    pub fn slope(&self) -> f64 {
        self.m_lo / self.eps_lo
    }

    pub fn payoff(&self, s: f64) -> f64 {
        if s <= self.strike - self.eps_lo {
            -self.m_lo
        } else if s >= self.strike + self.eps_hi {
            self.m_hi
        } else {
            self.slope() * (s - self.strike)
        }
    }
}

pub fn call_spread(params: CallSpreadParams, maturity: f64, r: f64) -> Result<ClaimTriplet> {
    params.validate()?;
    let m_lo = params.m_lo;
    ClaimTriplet::new(
        move |s| params.payoff(s),
        |_, _| 0.0,
        move |t, _| -m_lo * (-r * (maturity - t)).exp(),
        maturity,
    )
}

/// Long forward struck at `f0`; at the reference default the buyer pays the discounted strike.
pub fn equity_forward(f0: f64, maturity: f64, r: f64) -> Result<ClaimTriplet> {
    check_positive("f0", f0)?;
    ClaimTriplet::new(
        move |s| s - f0,
        |_, _| 0.0,
        move |t, _| -f0 * (-r * (maturity - t)).exp(),
        maturity,
    )
}

/// Equity total return swap; the premium `p` is charged on the notional `s0`.
pub fn equity_trs(s0: f64, premium: f64, maturity: f64, r: f64) -> Result<ClaimTriplet> {
    check_positive("s0", s0)?;
    if !(premium.is_finite() && premium >= r) {
        return Err(invalid("premium", format!("{premium} must be >= r = {r}")));
    }
    let mut c = ClaimTriplet::new(
        move |s| s - s0,
        move |_, _| -premium * s0,
        move |t, _| -s0 * (-r * (maturity - t)).exp(),
        maturity,
    )?;
    c.note = Some("premium is a rate on the notional s0: dividend = -premium * s0");
    Ok(c)
}

/// Protection buyer's CDS with zero recovery: pays `premium` continuously, receives 1 at default.
pub fn cds(premium: f64, maturity: f64) -> Result<ClaimTriplet> {
    if !(premium.is_finite() && premium >= 0.0) {
        return Err(invalid("premium", format!("{premium} must be >= 0")));
    }
    ClaimTriplet::new(|_| 0.0, move |_, _| -premium, |_, _| 1.0, maturity)
}

/// Total return swap on a defaultable zero-coupon bond maturing at `bond_maturity`.
///
/// `bond_at_maturity(x)` is the bond price `C(T, x; T')` at the swap maturity.
pub fn bond_trs(
    maturity: f64,
    bond_maturity: f64,
    premium: f64,
    strike: f64,
    r: f64,
    bond_at_maturity: impl Fn(f64) -> f64 + Send + Sync + 'static,
) -> Result<ClaimTriplet> {
    if bond_maturity < maturity {
        return Err(invalid(
            "bond_maturity",
            format!("{bond_maturity} must be >= swap maturity {maturity}"),
        ));
    }
    check_positive("strike", strike)?;
    ClaimTriplet::new(
        move |x| bond_at_maturity(x) - strike,
        move |_, _| -strike * (r + premium),
        move |_, _| -strike,
        maturity,
    )
}

pub fn european_call(strike: f64, maturity: f64) -> Result<ClaimTriplet> {
    check_positive("strike", strike)?;
    let mut c = ClaimTriplet::new(
        move |s| (s - strike).max(0.0),
        |_, _| 0.0,
        |_, _| 0.0,
        maturity,
    )?;
    c.nonnegative = true;
    Ok(c)
}

/// Pays 1 at maturity, nothing at default.
pub fn zero_coupon(maturity: f64) -> Result<ClaimTriplet> {
    let mut c = ClaimTriplet::new(|_| 1.0, |_, _| 0.0, |_, _| 0.0, maturity)?;
    c.nonnegative = true;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn call_spread_shape() {
        let c = call_spread(CallSpreadParams::symmetric(10.0, 0.01, 1.0), 2.0, 0.02).unwrap();
        assert_eq!(c.g(10.0), 0.0);
        assert_eq!(c.g(10.02), 1.0);
        assert_eq!(c.g(9.98), -1.0);
        assert!((c.l(0.0, 10.0) + (-0.04_f64).exp()).abs() < 1e-15);
        assert!((c.l(0.0, 10.0) + 0.960789).abs() < 1e-6);
        assert_eq!(c.h(0.3, 7.0), 0.0);
    }

    #[test]
    fn slope_mismatch() {
        let p = CallSpreadParams {
            strike: 10.0,
            eps_lo: 1.0,
            eps_hi: 2.0,
            m_lo: 1.0,
            m_hi: 1.0,
        };
        assert!(matches!(
            call_spread(p, 1.0, 0.0),
            Err(PricingError::SlopeMismatch { .. })
        ));
        let ok = CallSpreadParams {
            m_hi: 2.0,
            ..p
        };
        assert!(call_spread(ok, 1.0, 0.0).is_ok());
    }

    #[test]
    fn forward_and_trs() {
        let f = equity_forward(10.0, 3.0, 0.02).unwrap();
        assert_eq!(f.g(10.0), 0.0);
        assert_eq!(f.g(20.0), 10.0);
        assert!((f.l(1.0, 0.0) + 9.60789).abs() < 1e-5);

        let trs = equity_trs(10.0, 0.03, 3.0, 0.02).unwrap();
        assert_eq!(trs.g(10.0), 0.0);
        assert_eq!(trs.h(0.5, 3.0), trs.h(0.5, 30.0));
        assert_eq!(trs.l(1.0, 4.0), f.l(1.0, 4.0));
        assert!(trs.note.is_some());
        assert!(equity_trs(10.0, 0.01, 3.0, 0.02).is_err());
    }

    #[test]
    fn credit_claims() {
        let c = cds(0.01, 5.0).unwrap();
        assert_eq!(c.g(0.05), 0.0);
        assert_eq!(c.h(0.0, 0.02), -0.01);
        assert_eq!(c.l(1.0, 0.1), 1.0);

        let k = 0.8;
        let trs = bond_trs(3.0, 10.0, 0.01, k, 0.02, move |x| k + x).unwrap();
        assert_eq!(trs.g(0.0), 0.0);
        assert!((trs.h(0.0, 0.1) + k * 0.03).abs() < 1e-15);
        assert_eq!(trs.l(2.0, 0.3), -k);
        assert!(bond_trs(3.0, 2.0, 0.01, k, 0.02, |_| 1.0).is_err());
    }
}
