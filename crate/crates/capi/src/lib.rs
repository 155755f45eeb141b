//! C ABI for the confreg estimators.
//!
//! Geometries, confidence bands and fit reports are opaque handles created
//! and destroyed through this interface; every fallible call returns a
//! [`ConfregStatus`] and stores a human-readable message retrievable with
//! [`confreg_last_error_message`]. Matrices are passed row-major.
//!
//! Handles are not synchronized; share them across threads only for
//! concurrent reads (the underlying objects are immutable after creation).
//!
//! Safety contract for every function taking raw pointers: pointers must be
//! valid, aligned and sized as documented (matrices row-major with the
//! stated dimensions), handles must originate from this library and not be
//! used after the matching `_free` call. Null handle/argument pointers are
//! tolerated and reported as [`ConfregStatus::NullArgument`].
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::os::raw::c_char;

use confreg::estimators::{
    fit_correlation_selector, fit_dantzig, fit_ifs, fit_ifs_relaxed, fit_lasso, fit_ols,
};
use confreg::{ConfidenceBand, Error, FitReport, Geometry, Method, SolverOptions};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConfregStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A parameter was out of range or otherwise unusable.
    InvalidArgument = 2,
    DimensionMismatch = 3,
    /// The solver hit its iteration cap without certifying optimality.
    NotConverged = 4,
    /// The constraint system admits no solution.
    Infeasible = 5,
    /// A matrix factorization or other numerical step failed.
    NumericalFailure = 6,
}

/// Estimator selector for [`confreg_fit`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConfregMethod {
    Ols = 0,
    Lasso = 1,
    Ifs = 2,
    IfsRelaxed = 3,
    Dantzig = 4,
    CorrelationSelector = 5,
}

/// Iterative-solver knobs; obtain defaults from
/// [`confreg_solver_options_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct ConfregSolverOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub kappa: f64,
}

pub struct ConfregGeometry(Geometry);
pub struct ConfregBand(ConfidenceBand);
pub struct ConfregReport(FitReport);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg.into());
}

fn status_of(err: &Error) -> ConfregStatus {
    match err {
        Error::DimensionMismatch(_) | Error::IndexOutOfRange { .. } => {
            ConfregStatus::DimensionMismatch
        }
        Error::NotConverged(_) => ConfregStatus::NotConverged,
        Error::Infeasible | Error::Unbounded => ConfregStatus::Infeasible,
        Error::CholeskyFailure(_) | Error::InvalidGram(_) => ConfregStatus::NumericalFailure,
        _ => ConfregStatus::InvalidArgument,
    }
}

fn fail(err: Error) -> ConfregStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn null_fail(what: &str) -> ConfregStatus {
    set_error(format!("{what} must not be null"));
    ConfregStatus::NullArgument
}

/// Copies the message of the most recent error on this thread into `buffer`
/// (NUL-terminated, truncated to `capacity`). Returns the full message
/// length in bytes, excluding the terminator. A null or empty buffer only
/// queries the length.
#[no_mangle]
pub unsafe extern "C" fn confreg_last_error_message(buffer: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes();
        if !buffer.is_null() && capacity > 0 {
            let copy = bytes.len().min(capacity - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buffer.cast::<u8>(), copy);
            *buffer.add(copy) = 0;
        }
        bytes.len()
    })
}

/// Builds a geometry from a row-major n×m design matrix.
#[no_mangle]
pub unsafe extern "C" fn confreg_geometry_from_design(
    data: *const f64,
    n: usize,
    m: usize,
    out: *mut *mut ConfregGeometry,
) -> ConfregStatus {
    if data.is_null() || out.is_null() {
        return null_fail("data and out");
    }
    if n == 0 || m == 0 {
        set_error("design must be non-empty");
        return ConfregStatus::InvalidArgument;
    }
    let values = std::slice::from_raw_parts(data, n * m);
    let design = nalgebra::DMatrix::from_fn(n, m, |i, j| values[i * m + j]);
    match Geometry::from_design(design) {
        Ok(geom) => {
            *out = Box::into_raw(Box::new(ConfregGeometry(geom)));
            ConfregStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Builds a geometry from a row-major symmetric PSD m×m Gram matrix.
#[no_mangle]
pub unsafe extern "C" fn confreg_geometry_from_gram(
    data: *const f64,
    m: usize,
    out: *mut *mut ConfregGeometry,
) -> ConfregStatus {
    if data.is_null() || out.is_null() {
        return null_fail("data and out");
    }
    if m == 0 {
        set_error("gram must be non-empty");
        return ConfregStatus::InvalidArgument;
    }
    let values = std::slice::from_raw_parts(data, m * m);
    let gram = nalgebra::DMatrix::from_fn(m, m, |i, j| values[i * m + j]);
    match Geometry::from_gram(gram) {
        Ok(geom) => {
            *out = Box::into_raw(Box::new(ConfregGeometry(geom)));
            ConfregStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Rescales every dictionary element to unit general norm. `out_scales`,
/// when non-null, receives the m column scales.
#[no_mangle]
pub unsafe extern "C" fn confreg_geometry_normalize(
    geometry: *const ConfregGeometry,
    out: *mut *mut ConfregGeometry,
    out_scales: *mut f64,
) -> ConfregStatus {
    let Some(geometry) = geometry.as_ref() else {
        return null_fail("geometry");
    };
    if out.is_null() {
        return null_fail("out");
    }
    match geometry.0.normalize_columns() {
        Ok((normalized, scales)) => {
            if !out_scales.is_null() {
                std::ptr::copy_nonoverlapping(scales.as_ptr(), out_scales, scales.len());
            }
            *out = Box::into_raw(Box::new(ConfregGeometry(normalized)));
            ConfregStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Dictionary size m.
#[no_mangle]
pub unsafe extern "C" fn confreg_geometry_m(geometry: *const ConfregGeometry) -> usize {
    geometry.as_ref().map(|g| g.0.m()).unwrap_or(0)
}

/// Sample count n, or 0 for analytic-Gram geometries.
#[no_mangle]
pub unsafe extern "C" fn confreg_geometry_n(geometry: *const ConfregGeometry) -> usize {
    geometry.as_ref().and_then(|g| g.0.n()).unwrap_or(0)
}

#[no_mangle]
pub unsafe extern "C" fn confreg_geometry_free(geometry: *mut ConfregGeometry) {
    if !geometry.is_null() {
        drop(Box::from_raw(geometry));
    }
}

/// Empirical correlations α̃_j = (1/n)Σ_i f_j(X_i)Y_i into `out` (length m).
#[no_mangle]
pub unsafe extern "C" fn confreg_correlations(
    geometry: *const ConfregGeometry,
    response: *const f64,
    response_len: usize,
    out: *mut f64,
) -> ConfregStatus {
    let Some(geometry) = geometry.as_ref() else {
        return null_fail("geometry");
    };
    if response.is_null() || out.is_null() {
        return null_fail("response and out");
    }
    let y =
        nalgebra::DVector::from_column_slice(std::slice::from_raw_parts(response, response_len));
    match geometry.0.correlations(&y) {
        Ok(correlations) => {
            std::ptr::copy_nonoverlapping(correlations.as_ptr(), out, correlations.len());
            ConfregStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Constant practical radii (σ/3)√(log m / n) into `out` (length m); with
/// `as_squared_radius` false (the default interpretation) the value is
/// squared so `out` always carries squared radii ready for
/// [`confreg_band_new`].
#[no_mangle]
pub unsafe extern "C" fn confreg_radii_heuristic(
    m: usize,
    n: usize,
    sigma: f64,
    as_squared_radius: bool,
    out: *mut f64,
) -> ConfregStatus {
    if out.is_null() {
        return null_fail("out");
    }
    match confreg::confidence::radii_heuristic(m, n, sigma) {
        Ok(values) => {
            for (i, v) in values.into_iter().enumerate() {
                *out.add(i) = if as_squared_radius { v } else { v * v };
            }
            ConfregStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Bounded-response squared radii 8K²(1 + log(2m/ε))/n into `out`.
#[no_mangle]
pub unsafe extern "C" fn confreg_radii_bounded_response(
    m: usize,
    n: usize,
    k: f64,
    epsilon: f64,
    out: *mut f64,
) -> ConfregStatus {
    if out.is_null() {
        return null_fail("out");
    }
    match confreg::confidence::radii_lemma_bounded_response(m, n, k, epsilon) {
        Ok(values) => {
            std::ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
            ConfregStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Builds a confidence band from slab centers and squared radii (length m).
#[no_mangle]
pub unsafe extern "C" fn confreg_band_new(
    centers: *const f64,
    radii: *const f64,
    m: usize,
    epsilon: f64,
    out: *mut *mut ConfregBand,
) -> ConfregStatus {
    if centers.is_null() || radii.is_null() || out.is_null() {
        return null_fail("centers, radii and out");
    }
    let centers = std::slice::from_raw_parts(centers, m).to_vec();
    let radii = std::slice::from_raw_parts(radii, m).to_vec();
    match ConfidenceBand::new(centers, radii, epsilon) {
        Ok(band) => {
            *out = Box::into_raw(Box::new(ConfregBand(band)));
            ConfregStatus::Ok
        }
        Err(e) => fail(e),
    }
}

#[no_mangle]
pub unsafe extern "C" fn confreg_band_free(band: *mut ConfregBand) {
    if !band.is_null() {
        drop(Box::from_raw(band));
    }
}

#[no_mangle]
pub extern "C" fn confreg_solver_options_default() -> ConfregSolverOptions {
    let defaults = SolverOptions::default();
    ConfregSolverOptions {
        max_iterations: defaults.max_iterations,
        tolerance: defaults.tolerance,
        kappa: defaults.kappa,
    }
}

/// Fits a band-driven estimator. OLS is not available here; it consumes a
/// response instead of a band; use [`confreg_fit_ols`].
#[no_mangle]
pub unsafe extern "C" fn confreg_fit(
    geometry: *const ConfregGeometry,
    band: *const ConfregBand,
    method: ConfregMethod,
    options: *const ConfregSolverOptions,
    out: *mut *mut ConfregReport,
) -> ConfregStatus {
    let Some(geometry) = geometry.as_ref() else {
        return null_fail("geometry");
    };
    let Some(band) = band.as_ref() else {
        return null_fail("band");
    };
    if out.is_null() {
        return null_fail("out");
    }
    let mut solver = SolverOptions::default();
    if let Some(options) = options.as_ref() {
        solver.max_iterations = options.max_iterations;
        solver.tolerance = options.tolerance;
        solver.kappa = options.kappa;
    }
    let result = match method {
        ConfregMethod::Ols => {
            set_error("OLS takes a response, not a band; call confreg_fit_ols");
            return ConfregStatus::InvalidArgument;
        }
        ConfregMethod::Lasso => fit_lasso(&geometry.0, &band.0, &solver),
        ConfregMethod::Ifs => fit_ifs(&geometry.0, &band.0, &solver),
        ConfregMethod::IfsRelaxed => fit_ifs_relaxed(&geometry.0, &band.0, &solver),
        ConfregMethod::Dantzig => fit_dantzig(&geometry.0, &band.0, &solver),
        ConfregMethod::CorrelationSelector => fit_correlation_selector(&geometry.0, &band.0),
    };
    match result {
        Ok(report) => {
            *out = Box::into_raw(Box::new(ConfregReport(report)));
            ConfregStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Ordinary least squares on an empirical-design geometry.
#[no_mangle]
pub unsafe extern "C" fn confreg_fit_ols(
    geometry: *const ConfregGeometry,
    response: *const f64,
    response_len: usize,
    out: *mut *mut ConfregReport,
) -> ConfregStatus {
    let Some(geometry) = geometry.as_ref() else {
        return null_fail("geometry");
    };
    if response.is_null() || out.is_null() {
        return null_fail("response and out");
    }
    let y =
        nalgebra::DVector::from_column_slice(std::slice::from_raw_parts(response, response_len));
    match fit_ols(&geometry.0, &y) {
        Ok(report) => {
            *out = Box::into_raw(Box::new(ConfregReport(report)));
            ConfregStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Number of coefficients in the report.
#[no_mangle]
pub unsafe extern "C" fn confreg_report_len(report: *const ConfregReport) -> usize {
    report.as_ref().map(|r| r.0.coefficients.len()).unwrap_or(0)
}

/// Copies the fitted coefficients into `out` (capacity `len`; must be at
/// least [`confreg_report_len`]).
#[no_mangle]
pub unsafe extern "C" fn confreg_report_coefficients(
    report: *const ConfregReport,
    out: *mut f64,
    len: usize,
) -> ConfregStatus {
    let Some(report) = report.as_ref() else {
        return null_fail("report");
    };
    if out.is_null() {
        return null_fail("out");
    }
    let coefficients = &report.0.coefficients;
    if len < coefficients.len() {
        set_error(format!(
            "buffer holds {len} values, report has {}",
            coefficients.len()
        ));
        return ConfregStatus::DimensionMismatch;
    }
    std::ptr::copy_nonoverlapping(coefficients.as_ptr(), out, coefficients.len());
    ConfregStatus::Ok
}

#[no_mangle]
pub unsafe extern "C" fn confreg_report_iterations(report: *const ConfregReport) -> usize {
    report.as_ref().map(|r| r.0.iterations).unwrap_or(0)
}

#[no_mangle]
pub unsafe extern "C" fn confreg_report_converged(report: *const ConfregReport) -> bool {
    report.as_ref().map(|r| r.0.converged).unwrap_or(false)
}

#[no_mangle]
pub unsafe extern "C" fn confreg_report_nonzero_count(report: *const ConfregReport) -> usize {
    report.as_ref().map(|r| r.0.nonzero_count).unwrap_or(0)
}

#[no_mangle]
pub unsafe extern "C" fn confreg_report_method(report: *const ConfregReport) -> ConfregMethod {
    match report.as_ref().map(|r| r.0.method) {
        Some(Method::Ols) | None => ConfregMethod::Ols,
        Some(Method::Lasso) => ConfregMethod::Lasso,
        Some(Method::Ifs) => ConfregMethod::Ifs,
        Some(Method::RelaxedIfs) => ConfregMethod::IfsRelaxed,
        Some(Method::Dantzig) => ConfregMethod::Dantzig,
        Some(Method::CorrelationSelector) => ConfregMethod::CorrelationSelector,
    }
}

#[no_mangle]
pub unsafe extern "C" fn confreg_report_free(report: *mut ConfregReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
