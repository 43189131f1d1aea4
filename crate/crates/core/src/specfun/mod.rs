//! Self-contained special functions and quadrature engine.
//!
//! Bessel functions J0 and J1 of the first kind, an adaptive Gauss-Kronrod
//! integrator for finite and semi-infinite intervals, and a bracketing
//! bisection root finder. No external special-function provider is used.

mod bessel;
mod quad;

pub use bessel::{bessel_j0, bessel_j1};
pub(crate) use bessel::{j0, j1};
pub use quad::{
    bisect, integrate, integrate_vec, QuadratureResult, QuadratureSpec, SemiInfinitePolicy,
    VecQuadratureResult,
};
