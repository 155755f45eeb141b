//! Sparse linear regression through orthogonal projections onto
//! per-coordinate confidence slabs.
//!
//! Given a dictionary of m functions evaluated on n samples (possibly with
//! m > n), every estimator here projects a starting point onto the random
//! convex region ∩_j CR(j,ε), where CR(j,ε) constrains the j-th
//! GN-coordinate of the coefficient vector to a slab of half-width √r(j,ε)
//! around the empirical correlation α̃_j. Different starting points and
//! projection metrics produce different classical estimators:
//!
//! * projecting 0 in ‖·‖_GN: the LASSO ([`estimators::fit_lasso`]);
//! * greedy one-slab-at-a-time projections: Iterative Feature Selection
//!   ([`estimators::fit_ifs`], [`estimators::fit_ifs_relaxed`]);
//! * projecting 0 in ℓ₁: the Dantzig selector ([`estimators::fit_dantzig`]);
//! * projecting 0 in the CS norm: the Correlation Selector
//!   ([`estimators::fit_correlation_selector`]).
//!
//! [`oracle`] evaluates the associated sparsity-bound right-hand sides and
//! checks them empirically; [`simulate`] reproduces the toy-model Monte
//! Carlo comparison; the `confreg` binary exposes fitting, simulation and
//! verification from the command line.

pub mod confidence;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod io;
mod linalg;
pub mod oracle;
pub mod sampling;
pub mod simplex;
pub mod simulate;

pub use confidence::{ConfidenceBand, RadiiKind, RadiiPolicy};
pub use error::{Error, Result};
pub use estimators::{FitFlag, FitReport, Method, SolverOptions};
pub use geometry::{CoefVector, DesignMode, Geometry};
