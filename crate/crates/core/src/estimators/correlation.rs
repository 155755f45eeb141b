//! Correlation Selector: soft-threshold the correlation vector, then solve
//! M α = U.
//!
//! The slab program decouples over the GN-coordinates u_j = ⟨α, e_j⟩_GN, so
//! each u_j is the soft-thresholded correlation; any solution of M α = U is
//! valid and the minimum-Euclidean-norm one is returned. The coefficient
//! vector itself has no reason to be sparse; its GN-correlation vector
//! M α̂ does.

use crate::confidence::ConfidenceBand;
use crate::error::Result;
use crate::estimators::{check_band, soft_threshold, FitFlag, FitReport, Method};
use crate::geometry::{CoefVector, Geometry};
use crate::linalg;

const RANGE_TOL: f64 = 1e-8;

pub fn fit_correlation_selector(geometry: &Geometry, band: &ConfidenceBand) -> Result<FitReport> {
    check_band(geometry, band)?;
    let m = geometry.m();
    let u = CoefVector::from_fn(m, |j, _| {
        soft_threshold(band.centers()[j], band.threshold(j))
    });
    let (alpha, _) = linalg::solve_sym_min_norm(geometry.gram(), &u, linalg::PINV_CUTOFF);
    let residual = (geometry.gram() * &alpha - &u).amax();

    let mut report = FitReport::new(alpha, Method::CorrelationSelector);
    report.iterations = 1;
    if residual > RANGE_TOL {
        report.flags.push(FitFlag::RangeDeficient);
    }
    Ok(report)
}
