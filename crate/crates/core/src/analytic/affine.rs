use super::simpson;
use crate::error::{invalid, Result};
use crate::models::{FactorKind, FactorModel};

/// Simpson subintervals for upfront integrals over the swap life.
pub const UPFRONT_INTERVALS: usize = 500;
/// Simpson subintervals for the OU `A_1` integral.
pub const OU_A_INTERVALS: usize = 200;

/// Which OU bond and CDS expressions to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OuConvention {
    /// `B_1(u) = (1 - e^(-kappa u)) / kappa`, the solution of the bond Riccati system.
    #[default]
    Corrected,
    /// `B_1(u) = (1 - e^(kappa u)) / kappa` and the matching CDS integrand, as
    /// they are usually quoted; kept only for comparison.
    Printed,
}

/// `log E[exp(-int w0 X)] = a_term - b_term * x` over a horizon `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineBondTerms {
    pub a_term: f64,
    pub b_term: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub intervals: usize,
    pub ou_a_intervals: usize,
    pub ou: OuConvention,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            intervals: UPFRONT_INTERVALS,
            ou_a_intervals: OU_A_INTERVALS,
            ou: OuConvention::Corrected,
        }
    }
}

impl QuadratureOptions {
    /// Same options with every subinterval count doubled.
    pub fn refined(self) -> Self {
        Self {
            intervals: 2 * self.intervals,
            ou_a_intervals: 2 * self.ou_a_intervals,
            ..self
        }
    }
}

fn ou_b1(model: &FactorModel, u: f64, convention: OuConvention) -> f64 {
    match convention {
        OuConvention::Corrected => -(-model.kappa * u).exp_m1() / model.kappa,
        OuConvention::Printed => -(model.kappa * u).exp_m1() / model.kappa,
    }
}

pub fn ou_terms(model: &FactorModel, u: f64, opts: &QuadratureOptions) -> AffineBondTerms {
    let (k, th, s2, w0) = (model.kappa, model.theta, model.sigma * model.sigma, model.w0);
    match opts.ou {
        OuConvention::Corrected => {
            let a = simpson(
                |v| {
                    let b = w0 * ou_b1(model, v, OuConvention::Corrected);
                    0.5 * s2 * b * b - k * th * b
                },
                0.0,
                u,
                opts.ou_a_intervals,
            );
            AffineBondTerms {
                a_term: a,
                b_term: w0 * ou_b1(model, u, OuConvention::Corrected),
            }
        }
        OuConvention::Printed => {
            let a = simpson(
                |v| {
                    let b = ou_b1(model, v, OuConvention::Printed);
                    0.5 * s2 * b * b - k * th * b
                },
                0.0,
                u,
                opts.ou_a_intervals,
            );
            AffineBondTerms {
                a_term: a,
                b_term: w0 * ou_b1(model, u, OuConvention::Printed),
            }
        }
    }
}

struct Cir {
    xi: f64,
    kappa: f64,
    exponent: f64,
    kt: f64,
    w0: f64,
}

impl Cir {
    fn new(model: &FactorModel) -> Self {
        let s2 = model.sigma * model.sigma;
        Self {
            xi: (model.kappa * model.kappa + 2.0 * s2 * model.w0).sqrt(),
            kappa: model.kappa,
            exponent: 2.0 * model.kappa * model.theta / s2,
            kt: model.kappa * model.theta,
            w0: model.w0,
        }
    }

    fn denominator(&self, u: f64) -> f64 {
        (self.xi + self.kappa) * (self.xi * u).exp_m1() + 2.0 * self.xi
    }

    fn terms(&self, u: f64) -> AffineBondTerms {
        let den = self.denominator(u);
        let log_a = self.exponent
            * ((2.0 * self.xi).ln() + 0.5 * u * (self.xi + self.kappa) - den.ln());
        AffineBondTerms {
            a_term: log_a,
            b_term: 2.0 * (self.xi * u).exp_m1() * self.w0 / den,
        }
    }

    fn b_prime(&self, u: f64) -> f64 {
        let den = self.denominator(u);
        4.0 * self.w0 * self.xi * self.xi * (self.xi * u).exp() / (den * den)
    }
}

pub fn cir_terms(model: &FactorModel, u: f64) -> AffineBondTerms {
    Cir::new(model).terms(u)
}

/// Derivative in the horizon of the CIR `B_2` term.
pub fn cir_b_prime(model: &FactorModel, u: f64) -> f64 {
    Cir::new(model).b_prime(u)
}

fn check_state(model: &FactorModel, x: f64) -> Result<()> {
    model.validate()?;
    if model.kind == FactorKind::Cir && x < 0.0 {
        return Err(crate::error::PricingError::NegativeState(x));
    }
    Ok(())
}

fn check_horizon(t: f64, maturity: f64) -> Result<()> {
    if !(maturity >= t) {
        return Err(invalid("maturity", format!("{maturity} precedes t = {t}")));
    }
    Ok(())
}

fn bond_unchecked(model: &FactorModel, tau: f64, x: f64, r: f64, opts: &QuadratureOptions) -> f64 {
    if tau == 0.0 {
        return 1.0;
    }
    let terms = match model.kind {
        FactorKind::Ou => ou_terms(model, tau, opts),
        FactorKind::Cir => cir_terms(model, tau),
    };
    (-(r + model.psi0) * tau + terms.a_term - terms.b_term * x).exp()
}

/// Zero-recovery defaultable zero-coupon bond `C(t, x; maturity)` with intensity `psi0 + w0 x`.
pub fn bond_price(model: &FactorModel, t: f64, x: f64, maturity: f64, r: f64) -> Result<f64> {
    bond_price_with(model, t, x, maturity, r, &QuadratureOptions::default())
}

pub fn bond_price_with(
    model: &FactorModel,
    t: f64,
    x: f64,
    maturity: f64,
    r: f64,
    opts: &QuadratureOptions,
) -> Result<f64> {
    check_state(model, x)?;
    check_horizon(t, maturity)?;
    Ok(bond_unchecked(model, maturity - t, x, r, opts))
}

/// CRF upfront paid by the protection buyer of a zero-recovery CDS with running premium `premium`.
pub fn cds_upfront(
    model: &FactorModel,
    t: f64,
    x: f64,
    maturity: f64,
    premium: f64,
    r: f64,
) -> Result<f64> {
    cds_upfront_with(model, t, x, maturity, premium, r, &QuadratureOptions::default())
}

/// See [`cds_upfront`]. The integrand is the bond price times the expected
/// intensity under the bond's survival measure, minus the premium.
#[allow(clippy::too_many_arguments)]
pub fn cds_upfront_with(
    model: &FactorModel,
    t: f64,
    x: f64,
    maturity: f64,
    premium: f64,
    r: f64,
    opts: &QuadratureOptions,
) -> Result<f64> {
    check_state(model, x)?;
    check_horizon(t, maturity)?;
    let (k, th, s2, w0) = (model.kappa, model.theta, model.sigma * model.sigma, model.w0);
    let value = match model.kind {
        FactorKind::Cir => {
            let cir = Cir::new(model);
            simpson(
                |tau| {
                    let intensity =
                        model.psi0 + cir.kt * cir.terms(tau).b_term + cir.b_prime(tau) * x;
                    bond_unchecked(model, tau, x, r, opts) * (intensity - premium)
                },
                0.0,
                maturity - t,
                opts.intervals,
            )
        }
        FactorKind::Ou => simpson(
            |tau| {
                let decay = (-k * tau).exp();
                let intensity = match opts.ou {
                    OuConvention::Corrected => {
                        let b = -(-k * tau).exp_m1() / k;
                        model.psi0 + w0 * (x * decay + th * (1.0 - decay))
                            - 0.5 * s2 * w0 * w0 * b * b
                    }
                    OuConvention::Printed => {
                        w0 * x * decay + (k * th - s2 / k) * tau + s2 / k * (1.0 - decay)
                    }
                };
                bond_unchecked(model, tau, x, r, opts) * (intensity - premium)
            },
            0.0,
            maturity - t,
            opts.intervals,
        ),
    };
    Ok(value)
}

/// CRF upfront of a TRS on the bond maturing at `bond_maturity`:
/// `C(t, x; T') - K (1 + p int_t^T C(t, x; u) du)`.
#[allow(clippy::too_many_arguments)]
pub fn trs_upfront(
    model: &FactorModel,
    t: f64,
    x: f64,
    maturity: f64,
    bond_maturity: f64,
    premium: f64,
    strike: f64,
    r: f64,
) -> Result<f64> {
    trs_upfront_with(
        model,
        t,
        x,
        maturity,
        bond_maturity,
        premium,
        strike,
        r,
        &QuadratureOptions::default(),
    )
}

#[allow(clippy::too_many_arguments)]
pub fn trs_upfront_with(
    model: &FactorModel,
    t: f64,
    x: f64,
    maturity: f64,
    bond_maturity: f64,
    premium: f64,
    strike: f64,
    r: f64,
    opts: &QuadratureOptions,
) -> Result<f64> {
    check_state(model, x)?;
    check_horizon(t, maturity)?;
    check_horizon(maturity, bond_maturity)?;
    let annuity = simpson(
        |tau| bond_unchecked(model, tau, x, r, opts),
        0.0,
        maturity - t,
        opts.intervals,
    );
    Ok(bond_unchecked(model, bond_maturity - t, x, r, opts) - strike * (1.0 + premium * annuity))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cir() -> FactorModel {
        FactorModel::new(FactorKind::Cir, 0.05, 0.03, 0.05, 0.0, 1.0, 0.2).unwrap()
    }

    #[test]
    fn horizon_zero() {
        let m = cir();
        let t = cir_terms(&m, 0.0);
        assert!(t.a_term.abs() < 1e-15 && t.b_term.abs() < 1e-15);
        assert_eq!(bond_price(&m, 2.0, 0.05, 2.0, 0.02).unwrap(), 1.0);
        let ou = FactorModel { kind: FactorKind::Ou, ..m };
        let t = ou_terms(&ou, 0.0, &QuadratureOptions::default());
        assert_eq!((t.a_term, t.b_term), (0.0, 0.0));
    }

    #[test]
    fn cir_riccati_identities() {
        // B' = w0 - kappa B - sigma^2 B^2 / 2 and (log A)' = -kappa theta B
        let m = FactorModel { w0: 0.7, ..cir() };
        let h = 1e-5;
        for u in [0.3, 1.0, 4.0] {
            let b = cir_terms(&m, u).b_term;
            let bp = cir_b_prime(&m, u);
            let rhs = m.w0 - m.kappa * b - 0.5 * m.sigma * m.sigma * b * b;
            assert!((bp - rhs).abs() < 1e-12);
            let da = (cir_terms(&m, u + h).a_term - cir_terms(&m, u - h).a_term) / (2.0 * h);
            assert!((da + m.kappa * m.theta * b).abs() < 1e-8);
            let db = (cir_terms(&m, u + h).b_term - cir_terms(&m, u - h).b_term) / (2.0 * h);
            assert!((db - bp).abs() < 1e-8);
        }
    }

    #[test]
    fn trs_at_the_money_without_premium() {
        let m = cir();
        let k = bond_price(&m, 0.0, 0.08, 10.0, 0.02).unwrap();
        let v = trs_upfront(&m, 0.0, 0.08, 3.0, 10.0, 0.0, k, 0.02).unwrap();
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn cir_rejects_negative_state() {
        assert!(bond_price(&cir(), 0.0, -0.01, 1.0, 0.02).is_err());
    }
}
