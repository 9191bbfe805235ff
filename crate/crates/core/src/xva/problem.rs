use std::sync::Arc;

use super::{alpha_beta, source_f, PartyParams, Side, XvaCoefficients};
use crate::claims::ClaimTriplet;
use crate::error::{invalid, PricingError, Result};
use crate::models::Dynamics;
use crate::numgrid::{backward_solve, GridSpec, LocalCoefficients, Node, PdeProblem, Surface};

/// Starting surface `P^(0)` of the fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialGuess {
    #[default]
    Zero,
    /// The terminal payoff extended flat in time.
    FlatTerminal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointSettings {
    pub tolerance: f64,
    pub max_iter: usize,
    pub initial: InitialGuess,
    /// `(t, x)` nodes whose value is recorded after every iteration.
    pub probes: Vec<(f64, f64)>,
}

impl Default for FixedPointSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-5,
            max_iter: 50,
            initial: InitialGuess::Zero,
            probes: Vec::new(),
        }
    }
}

impl FixedPointSettings {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self {
            tolerance,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(invalid("tolerance", format!("{} must be > 0", self.tolerance)));
        }
        if self.max_iter == 0 {
            return Err(invalid("max_iter", "must be >= 1"));
        }
        Ok(())
    }
}

/// Trace of one fixed-point run.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    /// `sup |P^(n) - P^(n-1)|` over every node, for `n = 1, 2, ...`.
    pub errors: Vec<f64>,
    pub iterations: usize,
    pub tolerance: f64,
    pub converged: bool,
    pub lipschitz_bound: f64,
    pub probes: Vec<(f64, f64)>,
    /// `probe_values[n - 1][k]` is `P^(n)` at probe `k`.
    pub probe_values: Vec<Vec<f64>>,
}

impl IterationReport {
    pub fn last_error(&self) -> Option<f64> {
        self.errors.last().copied()
    }
}

pub struct BidAsk {
    pub bid: Surface,
    pub ask: Surface,
    /// `ask - bid` nodewise.
    pub spread: Surface,
    pub bid_report: IterationReport,
    pub ask_report: IterationReport,
}

/// Everything needed to price one claim on one grid.
#[derive(Clone, Debug)]
pub struct PricingProblem {
    pub dynamics: Dynamics,
    pub claim: ClaimTriplet,
    pub buyer: PartyParams,
    pub seller: PartyParams,
    pub grid: GridSpec,
}

impl PricingProblem {
    pub fn new(
        dynamics: Dynamics,
        claim: ClaimTriplet,
        buyer: PartyParams,
        seller: PartyParams,
        grid: GridSpec,
    ) -> Result<Self> {
        dynamics.validate()?;
        buyer.validate()?;
        seller.validate()?;
        grid.validate()?;
        if (grid.t_max - claim.maturity).abs() > 1e-12 * claim.maturity.max(1.0) {
            return Err(invalid(
                "t_max",
                format!(
                    "grid horizon {} differs from claim maturity {}",
                    grid.t_max, claim.maturity
                ),
            ));
        }
        if let Some(floor) = dynamics.state_floor() {
            if grid.x_min < floor {
                return Err(PricingError::NegativeState(grid.x_min));
            }
        }
        Ok(Self {
            dynamics,
            claim,
            buyer,
            seller,
            grid,
        })
    }

    pub fn coefficients(&self) -> XvaCoefficients {
        alpha_beta(&self.buyer, &self.seller)
    }

    /// `h + lambda0 * l` at `(t, x)`.
    pub fn base_source(&self, t: f64, x: f64) -> f64 {
        self.claim.h(t, x) + self.dynamics.reference_intensity(t, x) * self.claim.l(t, x)
    }

    /// Linear problem with discount `r + lambda0 + extra_discount`.
    pub fn pde(&self, extra_discount: f64) -> PdeProblem {
        let dynamics = self.dynamics;
        let floor = dynamics.state_floor().unwrap_or(f64::NEG_INFINITY);
        let r = dynamics.rate();
        let claim = self.claim.clone();
        PdeProblem {
            grid: self.grid,
            coefficients: Arc::new(move |t, x| {
                // the grid is validated against the floor, so this never clamps
                let (drift, diffusion_sq) = dynamics.state_terms(t, x.max(floor)).unwrap_or((0.0, 0.0));
                LocalCoefficients {
                    drift,
                    diffusion_sq,
                    discount: r + dynamics.reference_intensity(t, x) + extra_discount,
                }
            }),
            terminal: Arc::new(move |x| claim.g(x)),
            boundary: dynamics.boundary(),
        }
    }

    fn full_discount_pde(&self) -> PdeProblem {
        self.pde(self.coefficients().lambda_counterparties)
    }

    /// Counterparty-risk-free value: reference default only.
    pub fn solve_crf(&self) -> Result<Surface> {
        backward_solve(&self.pde(0.0), |n| self.base_source(n.t, n.x))
    }

    /// Linear solve with discount `r + lambda0 + shift` and source `h + lambda0 l`.
    pub fn solve_shifted(&self, shift: f64) -> Result<Surface> {
        backward_solve(&self.pde(shift), |n| self.base_source(n.t, n.x))
    }

    /// Value without provision: close-out at the CRF value `crf`.
    pub fn solve_without_provision(&self, crf: &Surface, side: Side) -> Result<Surface> {
        if *crf.grid() != self.grid {
            return Err(PricingError::GridMismatch);
        }
        let coeffs = self.coefficients();
        backward_solve(&self.full_discount_pde(), |n: Node| {
            source_f(&coeffs, self.base_source(n.t, n.x), crf.value(n.i, n.j), side)
        })
    }

    fn initial_surface(&self, initial: InitialGuess) -> Surface {
        match initial {
            InitialGuess::Zero => Surface::zeros(self.grid),
            InitialGuess::FlatTerminal => {
                let xs = self.grid.xs();
                Surface::from_fn(self.grid, |_, j| self.claim.g(xs[j]))
            }
        }
    }

    /// Picard iteration for the value with provision.
    ///
    /// Returns `NoConvergence` if the sup-norm step is still above tolerance
    /// after `max_iter` iterations.
    pub fn solve_with_provision(
        &self,
        side: Side,
        settings: &FixedPointSettings,
    ) -> Result<(Surface, IterationReport)> {
        let (surface, report) = self.iterate(side, settings)?;
        if !report.converged {
            return Err(PricingError::NoConvergence {
                iterations: report.iterations,
                last_error: report.last_error().unwrap_or(f64::INFINITY),
                tolerance: report.tolerance,
            });
        }
        Ok((surface, report))
    }

    /// Same iteration, but a run that exhausts `max_iter` is returned with
    /// `converged == false` instead of an error.
    pub fn iterate(
        &self,
        side: Side,
        settings: &FixedPointSettings,
    ) -> Result<(Surface, IterationReport)> {
        settings.validate()?;
        for &(t, x) in &settings.probes {
            if self.grid.time_index(t).is_none() || self.grid.node_index(x).is_none() {
                return Err(PricingError::ProbeOutsideGrid { t, x });
            }
        }
        let coeffs = self.coefficients();
        let pde = self.full_discount_pde();
        let mut report = IterationReport {
            errors: Vec::new(),
            iterations: 0,
            tolerance: settings.tolerance,
            converged: false,
            lipschitz_bound: coeffs.lipschitz_bound,
            probes: settings.probes.clone(),
            probe_values: Vec::new(),
        };
        let mut prev = self.initial_surface(settings.initial);
        for _ in 0..settings.max_iter {
            let next = backward_solve(&pde, |n: Node| {
                source_f(&coeffs, self.base_source(n.t, n.x), prev.value(n.i, n.j), side)
            })?;
            let err = next.max_abs_diff(&prev)?;
            report.iterations += 1;
            report.errors.push(err);
            report.probe_values.push(
                settings
                    .probes
                    .iter()
                    .map(|&(t, x)| next.at_node(t, x))
                    .collect::<Result<_>>()?,
            );
            prev = next;
            if err <= settings.tolerance {
                report.converged = true;
                break;
            }
        }
        Ok((prev, report))
    }

    /// Buyer and seller fixed points, solved concurrently.
    pub fn bid_ask(&self, settings: &FixedPointSettings) -> Result<BidAsk> {
        let (bid, ask) = std::thread::scope(|scope| {
            let ask = scope.spawn(|| self.solve_with_provision(Side::Seller, settings));
            let bid = self.solve_with_provision(Side::Buyer, settings);
            (bid, ask.join().expect("seller solve panicked"))
        });
        let (bid, bid_report) = bid?;
        let (ask, ask_report) = ask?;
        let spread = ask.zip_with(&bid, |a, b| a - b)?;
        Ok(BidAsk {
            bid,
            ask,
            spread,
            bid_report,
            ask_report,
        })
    }

    /// Crude a-priori bound `(|g| + T |h + lambda0 l|) e^(L T)` on any computed surface.
    pub fn sanity_bound(&self) -> f64 {
        let xs = self.grid.xs();
        let g = xs.iter().fold(0.0_f64, |m, &x| m.max(self.claim.g(x).abs()));
        let mut base = 0.0_f64;
        for i in 0..self.grid.layers() {
            let t = self.grid.t(i);
            for &x in &xs {
                base = base.max(self.base_source(t, x).abs());
            }
        }
        let t = self.grid.t_max;
        (g + t * base) * (self.coefficients().lipschitz_bound * t).exp()
    }
}
