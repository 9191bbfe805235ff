//! Finite-difference pricing of defaultable claims under bilateral counterparty
//! risk and collateralization.
//!
//! The mark-to-market value with a counterparty-risk provision solves a
//! semilinear parabolic PDE. It is computed by Picard iteration, where every
//! iterate is a linear Crank-Nicolson solve whose source term uses the
//! previous iterate. Closed-form prices in [`analytic`] serve both as pricers
//! and as oracles for the PDE engine.

pub mod analytic;
pub mod claims;
pub mod error;
pub mod models;
pub mod numgrid;
pub mod xva;

pub use error::{PricingError, Result};
