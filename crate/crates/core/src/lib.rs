//! Feasibility and stability of large random Lotka-Volterra communities.
//!
//! The interaction matrix `A` is random with standardized entries and the
//! equilibrium solves `x = r + A x / (α√n)`. As `n` grows, a positive solution
//! appears abruptly once `α` passes `√(2 log n)`, a threshold inherited from
//! the extreme values of Gaussian vectors.
//!
//! Modules:
//!
//! * [`ensembles`]: random matrices and growth vectors;
//! * [`equilibrium`]: certified solves and the `r + z/α + R/α²` expansion;
//! * [`evt`]: Gumbel constants, finite-`n` heuristics and tail bounds;
//! * [`stability`]: Jacobian spectra and Lotka-Volterra integration;
//! * [`experiments`]: deterministic, parallel Monte Carlo campaigns;
//! * [`plot`] and [`cli`]: SVG output and the `lvphase` command line.

pub mod cli;
pub mod ensembles;
pub mod equilibrium;
pub mod error;
pub mod evt;
pub mod experiments;
pub mod linalg;
pub mod plot;
pub mod seed;
pub mod stability;

pub use error::{Error, Result};
