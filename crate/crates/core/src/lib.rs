//! Deterministic greedy and randomized basis-function approximation on `[0,1]`,
//! together with the measure-concentration computations that explain when the
//! randomized route stalls: volume and waist fractions of high-dimensional
//! balls, quasi-orthogonality bounds, and empirical almost-orthogonal chains.
//!
//! The crate is organized around a handful of small, immutable value types:
//! [`GridFunction`] carries all L2 computation on a uniform midpoint grid,
//! [`BasisElement`] is a Gaussian bump or an interval indicator, and
//! [`ApproxModel`] is a basis list with linear coefficients and fit
//! diagnostics. Every operation is a pure function; randomized operations
//! take an explicit seeded stream so that runs replay bit-identically.

pub mod chains;
pub mod concentration;
pub mod error;
pub mod greedy;
pub mod numerics;
pub mod random_basis;
pub mod rng;
pub mod trace;

pub use error::{Error, Result};
pub use numerics::{
    least_squares_fit, least_squares_fit_with_tol, normalized_error, ApproxModel, BasisElement,
    GridFunction,
};
pub use trace::{ErrorTrace, Stall};
