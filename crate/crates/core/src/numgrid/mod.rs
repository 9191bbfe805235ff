//! Uniform 1-D lattices, tridiagonal solves and a Crank-Nicolson stepper for
//! linear parabolic problems with an inhomogeneous source.

mod crank_nicolson;
mod grid;
mod surface;
mod tridiagonal;

pub use crank_nicolson::{
    backward_solve, crank_nicolson_backstep, BoundaryPolicy, BoundaryRow, CoefficientFn,
    CrankNicolson, LocalCoefficients, Node, PdeProblem, StateFn,
};
pub use grid::GridSpec;
pub use surface::Surface;
pub use tridiagonal::{solve_tridiagonal, TridiagonalSystem, PIVOT_EPS};
