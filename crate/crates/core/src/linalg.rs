//! Small dense linear-algebra helpers shared by the estimators.

use nalgebra::{DMatrix, DVector};

/// Relative eigenvalue cutoff below which a symmetric matrix is treated as
/// rank-deficient in pseudo-inverse solves.
pub const PINV_CUTOFF: f64 = 1e-10;

/// Solves `M x = b` for symmetric positive-semidefinite `M`, returning the
/// minimum-Euclidean-norm solution when `M` is singular (eigenvalues below
/// `cutoff` relative to the largest are dropped).
///
/// The second return value is `true` when the rank-deficient path was taken.
pub fn solve_sym_min_norm(m: &DMatrix<f64>, b: &DVector<f64>, cutoff: f64) -> (DVector<f64>, bool) {
    let eig = m.clone().symmetric_eigen();
    let max_ev = eig.eigenvalues.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    if max_ev == 0.0 {
        return (DVector::zeros(m.nrows()), true);
    }
    let tol = cutoff * max_ev;
    let mut deficient = false;
    // x = V diag(1/lambda) V' b on the retained spectrum
    let vt_b = eig.eigenvectors.transpose() * b;
    let mut coeffs = DVector::zeros(vt_b.len());
    for i in 0..vt_b.len() {
        if eig.eigenvalues[i].abs() > tol {
            coeffs[i] = vt_b[i] / eig.eigenvalues[i];
        } else {
            deficient = true;
        }
    }
    (&eig.eigenvectors * coeffs, deficient)
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn sym_eig_range(m: &DMatrix<f64>) -> (f64, f64) {
    let eig = m.clone().symmetric_eigen();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in eig.eigenvalues.iter() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

/// Maximum absolute entry of `a - a'`.
pub fn asymmetry(a: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in (i + 1)..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

/// Maximum absolute deviation of `a` from the identity matrix.
pub fn identity_deviation(a: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a[(i, j)] - target).abs());
        }
    }
    worst
}
