use crate::error::{invalid, Result};

/// Largest collateral ratio accepted (120% over-collateralization).
pub const MAX_COLLATERAL_RATIO: f64 = 1.2;

/// Default and collateral terms of one party to the trade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartyParams {
    /// Default intensity of the party.
    pub intensity: f64,
    /// Loss given default, one minus the recovery rate.
    pub loss_rate: f64,
    /// Fraction of the mark-to-market value posted as collateral.
    pub collateral_ratio: f64,
    /// Collateral interest minus funding cost; may be negative.
    pub collateral_rate: f64,
}

impl PartyParams {
    pub fn new(
        intensity: f64,
        loss_rate: f64,
        collateral_ratio: f64,
        collateral_rate: f64,
    ) -> Result<Self> {
        let p = Self {
            intensity,
            loss_rate,
            collateral_ratio,
            collateral_rate,
        };
        p.validate()?;
        Ok(p)
    }

    /// Party from its recovery rate instead of its loss rate.
    pub fn with_recovery(
        intensity: f64,
        recovery: f64,
        collateral_ratio: f64,
        collateral_rate: f64,
    ) -> Result<Self> {
        Self::new(intensity, 1.0 - recovery, collateral_ratio, collateral_rate)
    }

    /// A party that never defaults and posts nothing.
    pub fn riskless() -> Self {
        Self {
            intensity: 0.0,
            loss_rate: 0.0,
            collateral_ratio: 0.0,
            collateral_rate: 0.0,
        }
    }

    pub fn recovery(&self) -> f64 {
        1.0 - self.loss_rate
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.intensity.is_finite() && self.intensity >= 0.0) {
            return Err(invalid("intensity", format!("{} must be >= 0", self.intensity)));
        }
        if !(0.0..=1.0).contains(&self.loss_rate) {
            return Err(invalid(
                "loss_rate",
                format!("{} must lie in [0, 1]", self.loss_rate),
            ));
        }
        if !(0.0..=MAX_COLLATERAL_RATIO).contains(&self.collateral_ratio) {
            return Err(invalid(
                "collateral_ratio",
                format!("{} must lie in [0, 1.2]", self.collateral_ratio),
            ));
        }
        if !self.collateral_rate.is_finite() {
            return Err(invalid("collateral_rate", "must be finite"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        assert!(PartyParams::new(0.05, 0.6, 0.0, 0.01).is_ok());
        assert!(PartyParams::new(0.05, 0.6, 1.2, -0.05).is_ok());
        assert!(PartyParams::new(-0.01, 0.6, 0.0, 0.0).is_err());
        assert!(PartyParams::new(0.05, 1.1, 0.0, 0.0).is_err());
        assert!(PartyParams::new(0.05, 0.6, 1.21, 0.0).is_err());
        let p = PartyParams::with_recovery(0.05, 0.4, 0.0, 0.0).unwrap();
        assert!((p.loss_rate - 0.6).abs() < 1e-15);
        assert!((p.recovery() + p.loss_rate - 1.0).abs() < 1e-15);
    }
}
