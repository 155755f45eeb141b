//! The general norm ‖·‖_GN, its Gram matrix, dictionary normalization and
//! empirical correlations.
//!
//! Two construction modes are supported. With an empirical design matrix
//! (deterministic-design case) the Gram matrix is FᵀF/n for the n×m feature
//! matrix F. With an analytic Gram matrix (random design whose distribution
//! is known) the caller supplies the matrix of inner products directly; it is
//! the only functional of the design distribution the estimators consume.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

/// Coefficient vector α ∈ R^m on the dictionary.
pub type CoefVector = DVector<f64>;

/// Absolute threshold under which a coefficient counts as zero in sparsity
/// accounting. Exact zeros are produced by soft thresholding, so any tiny
/// cutoff works.
pub const ZERO_TOL: f64 = 1e-10;

/// Number of coefficients with magnitude above [`ZERO_TOL`].
pub fn nonzero_count(v: &CoefVector) -> usize {
    v.iter().filter(|x| x.abs() > ZERO_TOL).count()
}

const SYMMETRY_TOL: f64 = 1e-12;
const PSD_REL_TOL: f64 = 1e-10;
const UNIT_DIAG_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DesignMode {
    /// Deterministic-design case: the geometry carries the n×m matrix of
    /// feature evaluations and the Gram matrix is FᵀF/n.
    EmpiricalDesign,
    /// Random-design case with known distribution: only the Gram matrix is
    /// available.
    AnalyticGram,
}

/// Immutable carrier of the quadratic form behind ‖·‖_GN.
#[derive(Clone, Debug)]
pub struct Geometry {
    mode: DesignMode,
    design: Option<DMatrix<f64>>,
    gram: DMatrix<f64>,
    n: Option<usize>,
    m: usize,
}

impl Geometry {
    /// Builds the empirical-design geometry from an n×m feature matrix.
    pub fn from_design(design: DMatrix<f64>) -> Result<Self> {
        let n = design.nrows();
        let m = design.ncols();
        if n == 0 || m == 0 {
            return Err(Error::InvalidParam(format!(
                "design must be non-empty, got {n}x{m}"
            )));
        }
        let mut gram = design.transpose() * &design / n as f64;
        // FᵀF/n is symmetric up to rounding; mirror the upper triangle so the
        // stored matrix is exactly symmetric.
        symmetrize(&mut gram);
        Ok(Self {
            mode: DesignMode::EmpiricalDesign,
            design: Some(design),
            gram,
            n: Some(n),
            m,
        })
    }

    /// Builds the analytic-Gram geometry from a symmetric PSD m×m matrix.
    pub fn from_gram(gram: DMatrix<f64>) -> Result<Self> {
        let m = gram.nrows();
        if m == 0 || gram.ncols() != m {
            return Err(Error::DimensionMismatch(format!(
                "gram must be square and non-empty, got {}x{}",
                gram.nrows(),
                gram.ncols()
            )));
        }
        let skew = linalg::asymmetry(&gram);
        if skew > SYMMETRY_TOL {
            return Err(Error::InvalidGram(format!(
                "asymmetry {skew:.3e} exceeds {SYMMETRY_TOL:.0e}"
            )));
        }
        let mut gram = gram;
        symmetrize(&mut gram);
        let (min_ev, max_ev) = linalg::sym_eig_range(&gram);
        if min_ev < -PSD_REL_TOL * max_ev.max(0.0) {
            return Err(Error::InvalidGram(format!(
                "not positive semidefinite: min eigenvalue {min_ev:.3e}"
            )));
        }
        Ok(Self {
            mode: DesignMode::AnalyticGram,
            design: None,
            gram,
            n: None,
            m,
        })
    }

    pub fn mode(&self) -> DesignMode {
        self.mode
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn design(&self) -> Option<&DMatrix<f64>> {
        self.design.as_ref()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> Option<usize> {
        self.n
    }

    /// True when every diagonal Gram entry is 1 within tolerance.
    pub fn is_normalized(&self) -> bool {
        (0..self.m).all(|j| (self.gram[(j, j)] - 1.0).abs() <= UNIT_DIAG_TOL)
    }

    /// True when the Gram matrix is the identity within `tol`.
    pub fn is_orthogonal(&self, tol: f64) -> bool {
        linalg::identity_deviation(&self.gram) <= tol
    }

    /// Rescales every dictionary element to unit general norm.
    ///
    /// Returns the normalized geometry together with the scale vector s with
    /// new_f_j = f_j / s_j, so a coefficient vector α on the normalized
    /// dictionary maps back to the original one as α_j / s_j.
    pub fn normalize_columns(&self) -> Result<(Self, Vec<f64>)> {
        let mut scales = Vec::with_capacity(self.m);
        for j in 0..self.m {
            let d = self.gram[(j, j)];
            if d <= 0.0 {
                return Err(Error::ZeroNormColumn(j));
            }
            scales.push(d.sqrt());
        }
        let geometry = match self.mode {
            DesignMode::EmpiricalDesign => {
                let mut design = self
                    .design
                    .clone()
                    .expect("empirical mode carries a design");
                for j in 0..self.m {
                    let mut col = design.column_mut(j);
                    col /= scales[j];
                }
                Self::from_design(design)?
            }
            DesignMode::AnalyticGram => {
                let mut gram = self.gram.clone();
                for i in 0..self.m {
                    for j in 0..self.m {
                        gram[(i, j)] /= scales[i] * scales[j];
                    }
                }
                Self::from_gram(gram)?
            }
        };
        Ok((geometry, scales))
    }

    /// ⟨a, b⟩_GN = aᵀ M b.
    pub fn gn_inner(&self, a: &CoefVector, b: &CoefVector) -> Result<f64> {
        self.check_len(a)?;
        self.check_len(b)?;
        Ok((a.transpose() * &self.gram * b)[(0, 0)])
    }

    /// ‖a‖²_GN.
    pub fn gn_norm_sq(&self, a: &CoefVector) -> Result<f64> {
        self.gn_inner(a, a)
    }

    /// The vector of GN-coordinates (⟨a, e_1⟩_GN, …, ⟨a, e_m⟩_GN) = M a.
    pub fn gn_coordinates(&self, a: &CoefVector) -> Result<CoefVector> {
        self.check_len(a)?;
        Ok(&self.gram * a)
    }

    /// Empirical correlations α̃ with α̃_j = (1/n) Σ_i f_j(X_i) Y_i.
    pub fn correlations(&self, y: &DVector<f64>) -> Result<CoefVector> {
        let design = self
            .design
            .as_ref()
            .ok_or_else(|| Error::ModeError("correlations need the design matrix".to_string()))?;
        let n = design.nrows();
        if y.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "response has length {}, design has {} rows",
                y.len(),
                n
            )));
        }
        Ok(design.transpose() * y / n as f64)
    }

    fn check_len(&self, v: &CoefVector) -> Result<()> {
        if v.len() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "coefficient vector has length {}, dictionary size is {}",
                v.len(),
                self.m
            )));
        }
        Ok(())
    }
}

fn symmetrize(a: &mut DMatrix<f64>) {
    for i in 0..a.nrows() {
        for j in (i + 1)..a.ncols() {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_design(n: usize, m: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(n, m, |_, _| rng.sample(rand_distr::StandardNormal))
    }

    #[test]
    fn identity_design_normalizes_to_unit_gram() {
        let n = 5;
        let geom = Geometry::from_design(DMatrix::identity(n, n)).unwrap();
        let (normed, scales) = geom.normalize_columns().unwrap();
        for s in &scales {
            assert!((s - 1.0 / (n as f64).sqrt()).abs() < 1e-14);
        }
        assert!(normed.is_orthogonal(1e-12));
    }

    #[test]
    fn zero_column_is_rejected() {
        let mut design = random_design(6, 3, 1);
        design.column_mut(1).fill(0.0);
        let geom = Geometry::from_design(design).unwrap();
        match geom.normalize_columns() {
            Err(Error::ZeroNormColumn(1)) => {}
            other => panic!("expected ZeroNormColumn(1), got {other:?}"),
        }
    }

    #[test]
    fn normalized_diagonal_matches_direct_column_norms() {
        let design = random_design(20, 8, 2);
        let geom = Geometry::from_design(design.clone()).unwrap();
        let (normed, scales) = geom.normalize_columns().unwrap();
        for j in 0..8 {
            // independent recomputation of (1/n) Σ_i f_j(X_i)²
            let direct: f64 = (0..20).map(|i| design[(i, j)].powi(2)).sum::<f64>() / 20.0;
            assert!((scales[j] - direct.sqrt()).abs() < 1e-12);
            assert!((normed.gram()[(j, j)] - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn normalize_is_idempotent() {
        let geom = Geometry::from_design(random_design(15, 6, 3)).unwrap();
        let (normed, _) = geom.normalize_columns().unwrap();
        let (_, second) = normed.normalize_columns().unwrap();
        for s in second {
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gn_inner_basis_vectors() {
        let geom = Geometry::from_design(random_design(20, 8, 4)).unwrap();
        let (normed, _) = geom.normalize_columns().unwrap();
        let e1 = DVector::from_fn(8, |i, _| if i == 0 { 1.0 } else { 0.0 });
        assert!((normed.gn_inner(&e1, &e1).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gn_inner_on_ar1_gram() {
        let rho: f64 = 0.5;
        let gram = DMatrix::from_fn(8, 8, |i, j| rho.powi((i as i32 - j as i32).abs()));
        let geom = Geometry::from_gram(gram).unwrap();
        let e1 = DVector::from_fn(8, |i, _| if i == 0 { 1.0 } else { 0.0 });
        let e2 = DVector::from_fn(8, |i, _| if i == 1 { 1.0 } else { 0.0 });
        assert!((geom.gn_inner(&e1, &e2).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn gn_inner_matches_double_sum() {
        let design = random_design(20, 8, 5);
        let geom = Geometry::from_design(design.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = DVector::from_fn(8, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
        let b = DVector::from_fn(8, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
        // direct evaluation of (1/n) Σ_i (Σ_j a_j f_j(X_i)) (Σ_j b_j f_j(X_i))
        let mut direct = 0.0;
        for i in 0..20 {
            let fa: f64 = (0..8).map(|j| a[j] * design[(i, j)]).sum();
            let fb: f64 = (0..8).map(|j| b[j] * design[(i, j)]).sum();
            direct += fa * fb;
        }
        direct /= 20.0;
        assert!((geom.gn_inner(&a, &b).unwrap() - direct).abs() < 1e-10);
    }

    #[test]
    fn correlations_orthonormal_picks_out_column() {
        // scaled identity block: columns orthonormal in the empirical norm
        let n = 4;
        let design = DMatrix::<f64>::identity(n, n) * (n as f64).sqrt();
        let geom = Geometry::from_design(design.clone()).unwrap();
        let y = design.column(0).into_owned();
        let corr = geom.correlations(&y).unwrap();
        assert!((corr[0] - 1.0).abs() < 1e-12);
        for j in 1..n {
            assert!(corr[j].abs() < 1e-12);
        }
    }

    #[test]
    fn correlations_zero_response() {
        let geom = Geometry::from_design(random_design(10, 4, 7)).unwrap();
        let corr = geom.correlations(&DVector::zeros(10)).unwrap();
        assert!(corr.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn correlations_match_naive_loop() {
        let design = random_design(20, 8, 8);
        let geom = Geometry::from_design(design.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let y = DVector::from_fn(20, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
        let corr = geom.correlations(&y).unwrap();
        for j in 0..8 {
            let naive: f64 = (0..20).map(|i| design[(i, j)] * y[i]).sum::<f64>() / 20.0;
            assert!((corr[j] - naive).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_mode_rejects_correlations() {
        let geom = Geometry::from_gram(DMatrix::identity(3, 3)).unwrap();
        assert!(matches!(
            geom.correlations(&DVector::zeros(3)),
            Err(Error::ModeError(_))
        ));
    }

    #[test]
    fn asymmetric_gram_is_rejected() {
        let mut gram = DMatrix::identity(3, 3);
        gram[(0, 1)] = 0.3;
        assert!(matches!(
            Geometry::from_gram(gram),
            Err(Error::InvalidGram(_))
        ));
    }

    #[test]
    fn indefinite_gram_is_rejected() {
        let mut gram = DMatrix::identity(2, 2);
        gram[(0, 1)] = 2.0;
        gram[(1, 0)] = 2.0;
        assert!(matches!(
            Geometry::from_gram(gram),
            Err(Error::InvalidGram(_))
        ));
    }
}
