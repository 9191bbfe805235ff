//! State dynamics mapped to PDE coefficients: a jump-to-default equity and
//! OU / CIR factors driving the reference default intensity.

use crate::error::{invalid, PricingError, Result};
use crate::numgrid::{BoundaryPolicy, LocalCoefficients};
use crate::xva::PartyParams;

/// Reference (underlying) default intensity of an equity model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntensitySpec {
    Constant(f64),
    /// `min(c * s^(-p), cap)`; equals `cap` at `s = 0`.
    CappedPower { c: f64, p: f64, cap: f64 },
}

impl IntensitySpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            IntensitySpec::Constant(l) if !(l.is_finite() && l >= 0.0) => {
                Err(invalid("lambda0", format!("{l} must be >= 0")))
            }
            IntensitySpec::CappedPower { c, p, cap } => {
                if !(c.is_finite() && c >= 0.0) {
                    return Err(invalid("intensity_c", format!("{c} must be >= 0")));
                }
                if !(p.is_finite() && p >= 0.0) {
                    return Err(invalid("intensity_p", format!("{p} must be >= 0")));
                }
                if !(cap.is_finite() && cap >= 0.0) {
                    return Err(invalid("intensity_cap", format!("{cap} must be >= 0")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn at(&self, s: f64) -> f64 {
        match *self {
            IntensitySpec::Constant(l) => l,
            IntensitySpec::CappedPower { c, p, cap } => {
                if s <= 0.0 {
                    cap
                } else {
                    (c * s.powf(-p)).min(cap)
                }
            }
        }
    }

    pub fn upper_bound(&self) -> f64 {
        match *self {
            IntensitySpec::Constant(l) => l,
            IntensitySpec::CappedPower { cap, .. } => cap,
        }
    }

    pub fn as_constant(&self) -> Option<f64> {
        match *self {
            IntensitySpec::Constant(l) => Some(l),
            IntensitySpec::CappedPower { .. } => None,
        }
    }
}

/// Pre-default geometric diffusion with jump to zero at the reference default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquityModel {
    pub r: f64,
    pub sigma: f64,
    pub ref_intensity: IntensitySpec,
}

impl EquityModel {
    pub fn new(r: f64, sigma: f64, ref_intensity: IntensitySpec) -> Result<Self> {
        let m = Self {
            r,
            sigma,
            ref_intensity,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r.is_finite() && self.r >= 0.0) {
            return Err(invalid("r", format!("{} must be >= 0", self.r)));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(invalid("sigma", format!("{} must be > 0", self.sigma)));
        }
        self.ref_intensity.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    Ou,
    Cir,
}

/// Mean-reverting factor `dX = kappa (theta - X) dt + sigma X^q dW` (q = 0 for OU, 1/2 for CIR).
///
/// The reference intensity is `psi0 + w0 * min(max(x, 0), x_cap)`. Setting
/// `capped` to false drops both truncations, which is only meaningful for
/// comparisons with the affine closed forms on wide grids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorModel {
    pub kind: FactorKind,
    pub kappa: f64,
    pub theta: f64,
    pub sigma: f64,
    pub psi0: f64,
    pub w0: f64,
    pub x_cap: f64,
    pub capped: bool,
}

impl FactorModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        kind: FactorKind,
        kappa: f64,
        theta: f64,
        sigma: f64,
        psi0: f64,
        w0: f64,
        x_cap: f64,
    ) -> Result<Self> {
        let m = Self {
            kind,
            kappa,
            theta,
            sigma,
            psi0,
            w0,
            x_cap,
            capped: true,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn uncapped(mut self) -> Self {
        self.capped = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("kappa", self.kappa),
            ("theta", self.theta),
            ("sigma", self.sigma),
            ("x_cap", self.x_cap),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("{v} must be > 0")));
            }
        }
        for (name, v) in [("psi0", self.psi0), ("w0", self.w0)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(name, format!("{v} must be >= 0")));
            }
        }
        if self.kind == FactorKind::Cir {
            let two_kappa_theta = 2.0 * self.kappa * self.theta;
            let sigma_sq = self.sigma * self.sigma;
            if two_kappa_theta <= sigma_sq {
                return Err(PricingError::FellerViolation {
                    two_kappa_theta,
                    sigma_sq,
                });
            }
        }
        Ok(())
    }

    pub fn intensity(&self, x: f64) -> f64 {
        if self.capped {
            self.psi0 + self.w0 * x.max(0.0).min(self.x_cap)
        } else {
            self.psi0 + self.w0 * x
        }
    }

    pub fn drift(&self, x: f64) -> f64 {
        self.kappa * (self.theta - x)
    }

    pub fn diffusion_sq(&self, x: f64) -> Result<f64> {
        match self.kind {
            FactorKind::Ou => Ok(self.sigma * self.sigma),
            FactorKind::Cir if x < 0.0 => Err(PricingError::NegativeState(x)),
            FactorKind::Cir => Ok(self.sigma * self.sigma * x),
        }
    }
}

fn counterparty_intensity(parties: (&PartyParams, &PartyParams)) -> f64 {
    parties.0.intensity + parties.1.intensity
}

/// Coefficients of the without-provision operator for an equity claim.
///
/// The drift is compensated by the reference intensity only; the discount
/// carries all three intensities.
pub fn equity_coefficients(
    model: &EquityModel,
    parties: (&PartyParams, &PartyParams),
    _t: f64,
    s: f64,
) -> LocalCoefficients {
    let l0 = model.ref_intensity.at(s);
    LocalCoefficients {
        drift: (model.r + l0) * s,
        diffusion_sq: model.sigma * model.sigma * s * s,
        discount: model.r + l0 + counterparty_intensity(parties),
    }
}

pub fn factor_coefficients(
    model: &FactorModel,
    parties: (&PartyParams, &PartyParams),
    r: f64,
    _t: f64,
    x: f64,
) -> Result<LocalCoefficients> {
    Ok(LocalCoefficients {
        drift: model.drift(x),
        diffusion_sq: model.diffusion_sq(x)?,
        discount: r + model.intensity(x) + counterparty_intensity(parties),
    })
}

/// The state process of a pricing problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dynamics {
    Equity(EquityModel),
    Factor { model: FactorModel, r: f64 },
}

impl Dynamics {
    pub fn validate(&self) -> Result<()> {
        match self {
            Dynamics::Equity(m) => m.validate(),
            Dynamics::Factor { model, r } => {
                if !(r.is_finite() && *r >= 0.0) {
                    return Err(invalid("r", format!("{r} must be >= 0")));
                }
                model.validate()
            }
        }
    }

    pub fn rate(&self) -> f64 {
        match self {
            Dynamics::Equity(m) => m.r,
            Dynamics::Factor { r, .. } => *r,
        }
    }

    pub fn reference_intensity(&self, _t: f64, x: f64) -> f64 {
        match self {
            Dynamics::Equity(m) => m.ref_intensity.at(x),
            Dynamics::Factor { model, .. } => model.intensity(x),
        }
    }

    /// `(drift, diffusion_sq)` of the pre-default state.
    pub fn state_terms(&self, _t: f64, x: f64) -> Result<(f64, f64)> {
        match self {
            Dynamics::Equity(m) => {
                if x < 0.0 {
                    return Err(PricingError::NegativeState(x));
                }
                let l0 = m.ref_intensity.at(x);
                Ok(((m.r + l0) * x, m.sigma * m.sigma * x * x))
            }
            Dynamics::Factor { model, .. } => Ok((model.drift(x), model.diffusion_sq(x)?)),
        }
    }

    /// Smallest admissible lower grid edge.
    pub fn state_floor(&self) -> Option<f64> {
        match self {
            Dynamics::Equity(_) => Some(0.0),
            Dynamics::Factor { model, .. } => match model.kind {
                FactorKind::Cir => Some(0.0),
                FactorKind::Ou => None,
            },
        }
    }

    pub fn boundary(&self) -> BoundaryPolicy {
        match self {
            Dynamics::Equity(_) => BoundaryPolicy::EQUITY,
            Dynamics::Factor { .. } => BoundaryPolicy::FACTOR,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bilateral_parties() -> (PartyParams, PartyParams) {
        (
            PartyParams::new(0.05, 0.6, 0.0, 0.01).unwrap(),
            PartyParams::new(0.15, 0.6, 0.0, 0.01).unwrap(),
        )
    }

    #[test]
    fn equity_table_parameters() {
        let m = EquityModel::new(0.02, 0.25, IntensitySpec::Constant(0.03)).unwrap();
        let (p1, p2) = bilateral_parties();
        let c = equity_coefficients(&m, (&p1, &p2), 0.0, 10.0);
        assert!((c.discount - 0.25).abs() < 1e-15);
        assert!((c.drift - 0.5).abs() < 1e-14);
        assert!((c.diffusion_sq - 6.25).abs() < 1e-12);

        let c0 = equity_coefficients(&m, (&p1, &p2), 0.0, 0.0);
        assert_eq!((c0.drift, c0.diffusion_sq), (0.0, 0.0));
        assert!((c0.discount - 0.25).abs() < 1e-15);
    }

    #[test]
    fn capped_local_intensity() {
        let spec = IntensitySpec::CappedPower {
            c: 0.02,
            p: 2.0,
            cap: 5.0,
        };
        assert_eq!(spec.at(0.01), 5.0);
        assert_eq!(spec.at(0.0), 5.0);
        assert!((spec.at(10.0) - 0.0002).abs() < 1e-15);
    }

    #[test]
    fn cir_table_parameters() {
        let m = FactorModel::new(FactorKind::Cir, 0.05, 0.03, 0.05, 0.0, 1.0, 0.2).unwrap();
        let (p1, p2) = bilateral_parties();
        let c = factor_coefficients(&m, (&p1, &p2), 0.02, 0.0, 0.02).unwrap();
        assert!((c.drift - 5e-4).abs() < 1e-15);
        assert!((c.diffusion_sq - 5e-5).abs() < 1e-15);
        assert!(matches!(
            factor_coefficients(&m, (&p1, &p2), 0.02, 0.0, -0.01),
            Err(PricingError::NegativeState(_))
        ));
    }

    #[test]
    fn ou_mean_level_and_cap() {
        let m = FactorModel::new(FactorKind::Ou, 0.05, 0.03, 0.035, 0.0, 1.0, 0.2).unwrap();
        assert_eq!(m.drift(0.03), 0.0);
        assert_eq!(m.intensity(0.5), 0.2);
        assert_eq!(m.intensity(-0.1), 0.0);
        assert_eq!(m.uncapped().intensity(-0.1), -0.1);
    }

    #[test]
    fn feller_is_enforced() {
        assert!(matches!(
            FactorModel::new(FactorKind::Cir, 0.05, 0.01, 0.05, 0.0, 1.0, 0.2),
            Err(PricingError::FellerViolation { .. })
        ));
        assert!(FactorModel::new(FactorKind::Ou, 0.05, 0.01, 0.05, 0.0, 1.0, 0.2).is_ok());
    }
}
