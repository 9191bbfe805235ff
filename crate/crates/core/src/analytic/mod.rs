//! Closed-form prices: Black-Scholes based equity formulas and affine
//! bond, CDS and TRS formulas for OU / CIR intensities.

mod affine;
mod equity;
mod quadrature;

pub use affine::{
    bond_price, bond_price_with, cds_upfront, cds_upfront_with, cir_b_prime, cir_terms, ou_terms,
    trs_upfront, trs_upfront_with, AffineBondTerms, OuConvention, QuadratureOptions,
    OU_A_INTERVALS, UPFRONT_INTERVALS,
};
pub use equity::{
    bs_call, call_with_provision, call_without_provision, crf_call_spread,
    forward_prices_without_provision, positive_payoff_price, positive_payoff_surface,
    without_provision_multiplier, ForwardPrices, FORWARD_INTERVALS,
};
pub use quadrature::simpson;
