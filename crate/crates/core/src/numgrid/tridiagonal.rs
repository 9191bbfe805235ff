use crate::error::{PricingError, Result};

/// Pivots smaller than this in magnitude abort the elimination.
pub const PIVOT_EPS: f64 = 1e-14;

/// `A x = rhs` with `A` tridiagonal; `lower[i]` sits at row `i + 1`, `upper[i]` at row `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn check_lengths(&self) -> Result<()> {
        let n = self.diag.len();
        if n == 0 {
            return Err(PricingError::DimensionMismatch("empty system".into()));
        }
        if self.rhs.len() != n || self.lower.len() + 1 != n || self.upper.len() + 1 != n {
            return Err(PricingError::DimensionMismatch(format!(
                "diag {n}, rhs {}, lower {}, upper {}",
                self.rhs.len(),
                self.lower.len(),
                self.upper.len()
            )));
        }
        Ok(())
    }

    /// `A * x`, used for residual checks.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.upper[i] * x[i + 1];
                }
                v
            })
            .collect()
    }
}

/// Thomas elimination.
pub fn solve_tridiagonal(system: &TridiagonalSystem) -> Result<Vec<f64>> {
    system.check_lengths()?;
    let mut x = vec![0.0; system.len()];
    let mut scratch = vec![0.0; system.len()];
    thomas(
        &system.lower,
        &system.diag,
        &system.upper,
        &system.rhs,
        &mut scratch,
        &mut x,
    )?;
    Ok(x)
}

/// Allocation-free Thomas sweep. `scratch` and `out` must have the length of `diag`.
pub(crate) fn thomas(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &[f64],
    scratch: &mut [f64],
    out: &mut [f64],
) -> Result<()> {
    let n = diag.len();
    let mut pivot = diag[0];
    if pivot.abs() < PIVOT_EPS {
        return Err(PricingError::ZeroPivot { row: 0, pivot });
    }
    out[0] = rhs[0] / pivot;
    for i in 1..n {
        scratch[i] = upper[i - 1] / pivot;
        pivot = diag[i] - lower[i - 1] * scratch[i];
        if pivot.abs() < PIVOT_EPS {
            return Err(PricingError::ZeroPivot { row: i, pivot });
        }
        out[i] = (rhs[i] - lower[i - 1] * out[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        out[i] -= scratch[i + 1] * out[i + 1];
    }
    Ok(())
}
