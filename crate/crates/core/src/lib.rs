//! Casimir-Polder force density on a perfectly conducting wall facing a
//! neutral ground-state atom, in the far zone.
//!
//! The reduced force density
//!
//! ```text
//! sigma_hat(u) = (17 + 10 u^2) / (1 + u^2)^(9/2),   u = rho / d
//! ```
//!
//! (in units of hbar*c*alpha / (4 pi^2 d^7)) is evaluated along three
//! mutually independent routes:
//!
//! * [`closedform`] - the analytic expression, plus derived plate quantities
//!   (total forces, enclosed-force fractions, torques);
//! * [`quadpath`] - nested numerical quadrature of the Bessel-kernel integral
//!   representation (theta, then k, then the regulator variable x);
//! * [`modesum`] - a finite-cavity double mode sum built from box mode
//!   functions, stress-tensor coefficients and dressed-vacuum amplitudes.
//!
//! [`specfun`] provides the self-contained Bessel and quadrature engine and
//! [`units`] the constants / unit-system boundary. [`cli`] wires everything
//! into the `cpwall` binary.

pub mod cli;
pub mod closedform;
pub mod modesum;
pub mod quadpath;
pub mod specfun;
pub mod units;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument or state (negative distance, non-finite input, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Configuration file or flag problem.
    #[error("config error: {0}")]
    Config(String),

    /// A numerical routine did not reach its requested tolerance.
    #[error("did not converge: {what} (best value {value:e}, error estimate {error:e})")]
    NonConvergence {
        what: String,
        value: f64,
        error: f64,
    },

    /// A mode-sum evaluation exceeded its configured cutoff budget.
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
