//! Ordinary least squares benchmark.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::estimators::{FitFlag, FitReport, Method};
use crate::geometry::Geometry;
use crate::linalg;

/// Minimizes the empirical squared error (1/n)Σ_i (Y_i − Σ_j α_j f_j(X_i))².
///
/// Solves the normal equations M α = α̃. When the Gram matrix is singular
/// (in particular whenever n < m) the minimum-Euclidean-norm minimizer is
/// returned and [`FitFlag::MinNormFallback`] is set.
pub fn fit_ols(geometry: &Geometry, y: &DVector<f64>) -> Result<FitReport> {
    if geometry.design().is_none() {
        return Err(Error::ModeError("OLS needs an empirical design".into()));
    }
    let correlations = geometry.correlations(y)?;
    let (coefficients, deficient) =
        linalg::solve_sym_min_norm(geometry.gram(), &correlations, linalg::PINV_CUTOFF);
    let underdetermined = geometry.n().map(|n| n < geometry.m()).unwrap_or(false);

    let mut report = FitReport::new(coefficients, Method::Ols);
    report.iterations = 1;
    if deficient || underdetermined {
        report.flags.push(FitFlag::MinNormFallback);
    }
    Ok(report)
}
