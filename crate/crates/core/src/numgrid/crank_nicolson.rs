use std::fmt;
use std::sync::Arc;

use super::tridiagonal::thomas;
use super::{GridSpec, Surface};
use crate::error::{PricingError, Result};

/// Coefficients of `u_t + drift u_x + 1/2 diffusion_sq u_xx - discount u + source = 0` at one node.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalCoefficients {
    pub drift: f64,
    pub diffusion_sq: f64,
    pub discount: f64,
}

/// How an edge row of the lattice is discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryRow {
    /// Both derivative terms vanish; the row is the ODE `u_t - discount u + source = 0`.
    Degenerate,
    /// `u_xx = 0`; the drift term uses the one-sided difference into the domain.
    ZeroCurvature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryPolicy {
    pub lower: BoundaryRow,
    pub upper: BoundaryRow,
}

impl BoundaryPolicy {
    /// Equity grids: `s = 0` is absorbing for the diffusion, the far edge is linear.
    pub const EQUITY: Self = Self {
        lower: BoundaryRow::Degenerate,
        upper: BoundaryRow::ZeroCurvature,
    };
    /// Factor grids: both edges linear.
    pub const FACTOR: Self = Self {
        lower: BoundaryRow::ZeroCurvature,
        upper: BoundaryRow::ZeroCurvature,
    };
}

/// Coordinates of a lattice node handed to source callbacks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub i: usize,
    pub j: usize,
    pub t: f64,
    pub x: f64,
}

pub type CoefficientFn = Arc<dyn Fn(f64, f64) -> LocalCoefficients + Send + Sync>;
pub type StateFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One linear terminal-value problem; the source term is supplied per solve.
#[derive(Clone)]
pub struct PdeProblem {
    pub grid: GridSpec,
    pub coefficients: CoefficientFn,
    pub terminal: StateFn,
    pub boundary: BoundaryPolicy,
}

impl fmt::Debug for PdeProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PdeProblem")
            .field("grid", &self.grid)
            .field("boundary", &self.boundary)
            .finish_non_exhaustive()
    }
}

// (Lu)_j = a u_{j-1} + b u_j + c u_{j+1}
#[derive(Clone, Copy, Default)]
struct Stencil {
    a: f64,
    b: f64,
    c: f64,
}

fn stencils(coeffs: &[LocalCoefficients], h: f64, boundary: BoundaryPolicy, out: &mut [Stencil]) {
    let m = coeffs.len() - 1;
    let (h2, two_h) = (h * h, 2.0 * h);
    for j in 1..m {
        let LocalCoefficients {
            drift,
            diffusion_sq,
            discount,
        } = coeffs[j];
        let diff = 0.5 * diffusion_sq / h2;
        out[j] = Stencil {
            a: diff - drift / two_h,
            b: -2.0 * diff - discount,
            c: diff + drift / two_h,
        };
    }
    let lo = coeffs[0];
    out[0] = match boundary.lower {
        BoundaryRow::Degenerate => Stencil {
            a: 0.0,
            b: -lo.discount,
            c: 0.0,
        },
        BoundaryRow::ZeroCurvature => Stencil {
            a: 0.0,
            b: -lo.drift / h - lo.discount,
            c: lo.drift / h,
        },
    };
    let hi = coeffs[m];
    out[m] = match boundary.upper {
        BoundaryRow::Degenerate => Stencil {
            a: 0.0,
            b: -hi.discount,
            c: 0.0,
        },
        BoundaryRow::ZeroCurvature => Stencil {
            a: -hi.drift / h,
            b: hi.drift / h - hi.discount,
            c: 0.0,
        },
    };
}

/// Reusable buffers for repeated Crank-Nicolson steps on one grid.
pub struct CrankNicolson {
    h: f64,
    dt: f64,
    boundary: BoundaryPolicy,
    now: Vec<Stencil>,
    next: Vec<Stencil>,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    rhs: Vec<f64>,
    scratch: Vec<f64>,
}

impl CrankNicolson {
    pub fn new(nodes: usize, h: f64, dt: f64, boundary: BoundaryPolicy) -> Self {
        Self {
            h,
            dt,
            boundary,
            now: vec![Stencil::default(); nodes],
            next: vec![Stencil::default(); nodes],
            lower: vec![0.0; nodes - 1],
            diag: vec![0.0; nodes],
            upper: vec![0.0; nodes - 1],
            rhs: vec![0.0; nodes],
            scratch: vec![0.0; nodes],
        }
    }

    /// One theta = 1/2 step from layer `i + 1` (`next`) back to layer `i` (`out`).
    #[allow(clippy::too_many_arguments)]
    pub fn step(
        &mut self,
        coeffs_now: &[LocalCoefficients],
        coeffs_next: &[LocalCoefficients],
        source_now: &[f64],
        source_next: &[f64],
        next_values: &[f64],
        out: &mut [f64],
    ) -> Result<()> {
        let n = self.diag.len();
        for (name, len) in [
            ("coeffs_now", coeffs_now.len()),
            ("coeffs_next", coeffs_next.len()),
            ("source_now", source_now.len()),
            ("source_next", source_next.len()),
            ("next_values", next_values.len()),
            ("out", out.len()),
        ] {
            if len != n {
                return Err(PricingError::DimensionMismatch(format!(
                    "{name} has {len} entries, grid has {n} nodes"
                )));
            }
        }
        stencils(coeffs_now, self.h, self.boundary, &mut self.now);
        stencils(coeffs_next, self.h, self.boundary, &mut self.next);
        let half = 0.5 * self.dt;
        for j in 0..n {
            let s = self.next[j];
            let mut explicit = s.b * next_values[j];
            if j > 0 {
                explicit += s.a * next_values[j - 1];
            }
            if j + 1 < n {
                explicit += s.c * next_values[j + 1];
            }
            self.rhs[j] =
                next_values[j] + half * explicit + half * (source_now[j] + source_next[j]);

            let s = self.now[j];
            self.diag[j] = 1.0 - half * s.b;
            if j > 0 {
                self.lower[j - 1] = -half * s.a;
            }
            if j + 1 < n {
                self.upper[j] = -half * s.c;
            }
        }
        thomas(
            &self.lower,
            &self.diag,
            &self.upper,
            &self.rhs,
            &mut self.scratch,
            out,
        )
    }
}

/// Single backward step; see [`CrankNicolson::step`].
#[allow(clippy::too_many_arguments)]
pub fn crank_nicolson_backstep(
    coeffs_now: &[LocalCoefficients],
    coeffs_next: &[LocalCoefficients],
    source_now: &[f64],
    source_next: &[f64],
    next_values: &[f64],
    boundary: BoundaryPolicy,
    dx: f64,
    dt: f64,
) -> Result<Vec<f64>> {
    if dt <= 0.0 || dx <= 0.0 {
        return Err(PricingError::InvalidGrid("dx and dt must be positive".into()));
    }
    if next_values.len() < 3 {
        return Err(PricingError::InvalidGrid("need at least 3 nodes".into()));
    }
    let mut out = vec![0.0; next_values.len()];
    CrankNicolson::new(next_values.len(), dx, dt, boundary).step(
        coeffs_now,
        coeffs_next,
        source_now,
        source_next,
        next_values,
        &mut out,
    )?;
    Ok(out)
}

/// Solves `problem` backward from its terminal layer with the given source field.
///
/// The source and the coefficients are evaluated at the nodes of both time
/// levels of every step.
pub fn backward_solve(problem: &PdeProblem, source: impl Fn(Node) -> f64) -> Result<Surface> {
    let grid = problem.grid;
    grid.validate()?;
    let (n_steps, nodes) = (grid.time_steps(), grid.nodes());
    let xs = grid.xs();

    let mut surface = Surface::zeros(grid);
    for (v, &x) in surface.row_mut(n_steps).iter_mut().zip(&xs) {
        *v = (problem.terminal)(x);
    }

    let layer = |i: usize, coeffs: &mut Vec<LocalCoefficients>, src: &mut Vec<f64>| {
        let t = grid.t(i);
        coeffs.clear();
        src.clear();
        for (j, &x) in xs.iter().enumerate() {
            coeffs.push((problem.coefficients)(t, x));
            src.push(source(Node { i, j, t, x }));
        }
    };

    let mut stepper = CrankNicolson::new(nodes, grid.h(), grid.k(), problem.boundary);
    let (mut c_next, mut s_next) = (Vec::with_capacity(nodes), Vec::with_capacity(nodes));
    let (mut c_now, mut s_now) = (Vec::with_capacity(nodes), Vec::with_capacity(nodes));
    layer(n_steps, &mut c_next, &mut s_next);
    let mut next = surface.row(n_steps).to_vec();
    let mut now = vec![0.0; nodes];
    for i in (0..n_steps).rev() {
        layer(i, &mut c_now, &mut s_now);
        stepper.step(&c_now, &c_next, &s_now, &s_next, &next, &mut now)?;
        surface.row_mut(i).copy_from_slice(&now);
        std::mem::swap(&mut next, &mut now);
        std::mem::swap(&mut c_next, &mut c_now);
        std::mem::swap(&mut s_next, &mut s_now);
    }
    Ok(surface)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(c: LocalCoefficients, n: usize) -> Vec<LocalCoefficients> {
        vec![c; n]
    }

    #[test]
    fn zero_operator_is_identity() {
        let next = vec![1.0, -2.0, 3.5, 0.25, 7.0];
        let c = constant(LocalCoefficients::default(), 5);
        let z = vec![0.0; 5];
        for policy in [BoundaryPolicy::EQUITY, BoundaryPolicy::FACTOR] {
            let out = crank_nicolson_backstep(&c, &c, &z, &z, &next, policy, 0.1, 0.01).unwrap();
            assert_eq!(out, next);
        }
    }

    #[test]
    fn pure_discounting_factor() {
        let r = 0.07;
        let dt = 0.02;
        let next = vec![1.0, 2.0, -3.0, 4.0];
        let c = constant(
            LocalCoefficients {
                drift: 0.0,
                diffusion_sq: 0.0,
                discount: r,
            },
            4,
        );
        let z = vec![0.0; 4];
        let out =
            crank_nicolson_backstep(&c, &c, &z, &z, &next, BoundaryPolicy::EQUITY, 0.5, dt).unwrap();
        let factor = (1.0 - r * dt / 2.0) / (1.0 + r * dt / 2.0);
        for (o, v) in out.iter().zip(&next) {
            assert!((o - v * factor).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_data_preserved_by_pure_advection() {
        // u_t + u_x = 0 with u(T, x) = x  =>  u(t, x) = x + (T - t)
        let grid = GridSpec::new(0.0, 1.0, 0.1, 1.0, 0.1).unwrap();
        let problem = PdeProblem {
            grid,
            coefficients: Arc::new(|_, _| LocalCoefficients {
                drift: 1.0,
                diffusion_sq: 0.3,
                discount: 0.0,
            }),
            terminal: Arc::new(|x| x),
            boundary: BoundaryPolicy::FACTOR,
        };
        let s = backward_solve(&problem, |_| 0.0).unwrap();
        for j in 0..grid.nodes() {
            assert!((s.value(0, j) - (grid.x(j) + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_solution_without_rates() {
        let grid = GridSpec::new(0.0, 4.0, 0.5, 1.0, 0.1).unwrap();
        let problem = PdeProblem {
            grid,
            coefficients: Arc::new(|_, s| LocalCoefficients {
                drift: 0.0,
                diffusion_sq: 0.04 * s * s,
                discount: 0.0,
            }),
            terminal: Arc::new(|_| 1.0),
            boundary: BoundaryPolicy::EQUITY,
        };
        let s = backward_solve(&problem, |_| 0.0).unwrap();
        assert!(s.values().iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn exponential_decay() {
        let grid = GridSpec::new(0.0, 4.0, 0.5, 2.0, 0.01).unwrap();
        let problem = PdeProblem {
            grid,
            coefficients: Arc::new(|_, _| LocalCoefficients {
                drift: 0.0,
                diffusion_sq: 0.0,
                discount: 0.05,
            }),
            terminal: Arc::new(|_| 1.0),
            boundary: BoundaryPolicy::EQUITY,
        };
        let s = backward_solve(&problem, |_| 0.0).unwrap();
        for j in 0..grid.nodes() {
            assert!((s.value(0, j) - (-0.1_f64).exp()).abs() < 1e-6);
        }
    }

    #[test]
    fn mismatched_lengths() {
        let c = constant(LocalCoefficients::default(), 4);
        let z = vec![0.0; 3];
        let next = vec![0.0; 4];
        assert!(
            crank_nicolson_backstep(&c, &c, &z, &z, &next, BoundaryPolicy::EQUITY, 0.1, 0.1)
                .is_err()
        );
    }
}
