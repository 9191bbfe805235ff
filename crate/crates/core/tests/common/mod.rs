#![allow(dead_code)]

use xva_core::claims::{self, CallSpreadParams};
use xva_core::models::{Dynamics, EquityModel, FactorKind, FactorModel, IntensitySpec};
use xva_core::numgrid::GridSpec;
use xva_core::xva::{PartyParams, PricingProblem};

pub const R: f64 = 0.02;

pub fn party(intensity: f64, recovery: f64, delta: f64, c: f64) -> PartyParams {
    PartyParams::with_recovery(intensity, recovery, delta, c).unwrap()
}

pub fn equity(lambda0: f64) -> EquityModel {
    EquityModel::new(R, 0.25, IntensitySpec::Constant(lambda0)).unwrap()
}

/// Call spread at K = 10, T = 2, sigma = 25%, lambda0 = 3%.
pub fn call_spread_problem(
    eps: f64,
    buyer: PartyParams,
    seller: PartyParams,
    grid: GridSpec,
) -> PricingProblem {
    let claim = claims::call_spread(CallSpreadParams::symmetric(10.0, eps, 1.0), 2.0, R).unwrap();
    PricingProblem::new(Dynamics::Equity(equity(0.03)), claim, buyer, seller, grid).unwrap()
}

pub fn fine_grid() -> GridSpec {
    GridSpec::new(0.0, 40.0, 0.01, 2.0, 1.0 / 1000.0).unwrap()
}

/// The coarser grid used for the sensitivity sweeps.
pub fn coarse_grid() -> GridSpec {
    GridSpec::new(0.0, 40.0, 0.05, 2.0, 1.0 / 250.0).unwrap()
}

pub fn bilateral_parties() -> (PartyParams, PartyParams) {
    (party(0.05, 0.4, 0.0, 0.01), party(0.15, 0.4, 0.0, 0.01))
}

pub fn forward_problem(s_bar: f64, buyer: PartyParams, seller: PartyParams) -> PricingProblem {
    let grid = GridSpec::new(0.0, s_bar, 0.05, 3.0, 1.0 / 500.0).unwrap();
    PricingProblem::new(
        Dynamics::Equity(equity(0.03)),
        claims::equity_forward(10.0, 3.0, R).unwrap(),
        buyer,
        seller,
        grid,
    )
    .unwrap()
}

pub fn cir() -> FactorModel {
    FactorModel::new(FactorKind::Cir, 0.05, 0.03, 0.05, 0.0, 1.0, 0.2).unwrap()
}

pub fn ou() -> FactorModel {
    FactorModel::new(FactorKind::Ou, 0.05, 0.03, 0.035, 0.0, 1.0, 0.2).unwrap()
}

pub fn factor_grid(t_max: f64) -> GridSpec {
    GridSpec::new(0.0, 0.2, 0.001, t_max, 1.0 / 500.0).unwrap()
}

pub fn cds_parties() -> (PartyParams, PartyParams) {
    (party(0.05, 0.4, 0.0, 0.0), party(0.25, 0.4, 0.0, 0.0))
}

pub fn cds_problem(model: FactorModel, grid: GridSpec) -> PricingProblem {
    let (b, s) = cds_parties();
    PricingProblem::new(
        Dynamics::Factor { model, r: R },
        claims::cds(0.01, 5.0).unwrap(),
        b,
        s,
        grid,
    )
    .unwrap()
}

/// Call with lambda0 = 5%, unilateral seller risk 10%, K = S0 = 10, T = 1.
pub fn call_problem(grid: GridSpec, buyer: PartyParams, seller: PartyParams) -> PricingProblem {
    PricingProblem::new(
        Dynamics::Equity(equity(0.05)),
        claims::european_call(10.0, 1.0).unwrap(),
        buyer,
        seller,
        grid,
    )
    .unwrap()
}

pub fn call_grid() -> GridSpec {
    GridSpec::new(0.0, 40.0, 0.05, 1.0, 1.0 / 500.0).unwrap()
}

pub fn call_parties() -> (PartyParams, PartyParams) {
    (party(0.0, 0.4, 0.0, 0.0), party(0.10, 0.4, 0.0, 0.0))
}
