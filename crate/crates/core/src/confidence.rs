//! Confidence bands: per-coordinate slab centers α̃_j and squared radii
//! r(j,ε), plus the closed-form orthogonal projection onto a single slab.
//!
//! The slab CR(j,ε) is the set of coefficient vectors whose j-th
//! GN-coordinate ⟨α, e_j⟩_GN lies within √r(j,ε) of the empirical
//! correlation α̃_j. Radii come either from the deviation-inequality
//! formulas (bounded regression function, bounded response) or from the
//! practical constant choice (σ/3)√(log m / n).

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CoefVector, Geometry};

/// How per-coordinate radii are produced.
///
/// Parameters are the ones the corresponding formula consumes; `Custom`
/// carries the squared radii verbatim.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadiiKind {
    /// r_j = (4(1 + log(2m/ε))/n)·[(1/n)Σ_i f_j(X_i)² Y_i² + L² + σ²]
    LemmaBoundedRegression { l: f64, sigma_sq: f64 },
    /// r_j = 8K²(1 + log(2m/ε))/n, constant over j.
    LemmaBoundedResponse { k: f64 },
    /// The practical choice (σ/3)√(log m / n). By default the value is the
    /// slab half-width √r (the soft threshold); set `as_squared_radius` to
    /// treat it as r itself.
    HeuristicSigma {
        sigma: f64,
        #[serde(default)]
        as_squared_radius: bool,
    },
    /// Constant squared radius for every coordinate.
    Constant { value: f64 },
    /// Per-coordinate squared radii supplied by the caller.
    Custom { radii: Vec<f64> },
}

/// Radii recipe plus the confidence level ε.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadiiPolicy {
    #[serde(flatten)]
    pub kind: RadiiKind,
    pub epsilon: f64,
}

impl RadiiPolicy {
    pub fn heuristic(sigma: f64, epsilon: f64) -> Self {
        Self {
            kind: RadiiKind::HeuristicSigma {
                sigma,
                as_squared_radius: false,
            },
            epsilon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::InvalidParam(format!(
                "epsilon must lie in (0, 1], got {}",
                self.epsilon
            )));
        }
        match &self.kind {
            RadiiKind::LemmaBoundedRegression { l, sigma_sq } => {
                if *l <= 0.0 || *sigma_sq < 0.0 {
                    return Err(Error::InvalidParam(
                        "bounded-regression radii need L > 0 and sigma_sq >= 0".into(),
                    ));
                }
            }
            RadiiKind::LemmaBoundedResponse { k } => {
                if *k <= 0.0 {
                    return Err(Error::InvalidParam(
                        "bounded-response radii need K > 0".into(),
                    ));
                }
            }
            RadiiKind::HeuristicSigma { sigma, .. } => {
                if *sigma <= 0.0 {
                    return Err(Error::InvalidParam("heuristic radii need sigma > 0".into()));
                }
            }
            RadiiKind::Constant { value } => {
                if *value < 0.0 || !value.is_finite() {
                    return Err(Error::InvalidParam(
                        "constant radius must be finite and >= 0".into(),
                    ));
                }
            }
            RadiiKind::Custom { radii } => {
                if radii.iter().any(|r| *r < 0.0 || !r.is_finite()) {
                    return Err(Error::InvalidParam(
                        "custom radii must be finite and >= 0".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Materializes the squared radii for the given data.
    pub fn radii(&self, geometry: &Geometry, y: &DVector<f64>) -> Result<Vec<f64>> {
        self.validate()?;
        let m = geometry.m();
        match &self.kind {
            RadiiKind::LemmaBoundedRegression { l, sigma_sq } => {
                radii_lemma_bounded_regression(geometry, y, *l, *sigma_sq, self.epsilon)
            }
            RadiiKind::LemmaBoundedResponse { k } => {
                let n = geometry.n().ok_or_else(|| {
                    Error::ModeError("bounded-response radii need the sample count".into())
                })?;
                radii_lemma_bounded_response(m, n, *k, self.epsilon)
            }
            RadiiKind::HeuristicSigma {
                sigma,
                as_squared_radius,
            } => {
                let n = geometry.n().ok_or_else(|| {
                    Error::ModeError("heuristic radii need the sample count".into())
                })?;
                let values = radii_heuristic(m, n, *sigma)?;
                Ok(if *as_squared_radius {
                    values
                } else {
                    values.into_iter().map(|v| v * v).collect()
                })
            }
            RadiiKind::Constant { value } => Ok(vec![*value; m]),
            RadiiKind::Custom { radii } => {
                if radii.len() != m {
                    return Err(Error::DimensionMismatch(format!(
                        "custom radii have length {}, dictionary size is {m}",
                        radii.len()
                    )));
                }
                Ok(radii.clone())
            }
        }
    }
}

/// Squared radii under a bounded regression function (‖f‖_∞ ≤ L) and noise
/// variance at most σ²:
///
/// r_j = (4(1 + log(2m/ε))/n)·[(1/n)Σ_i f_j(X_i)² Y_i² + L² + σ²]
///
/// ε may exceed 1 (the log term then shrinks past zero at ε = 2m); the
/// meaningful confidence range is (0, 1].
pub fn radii_lemma_bounded_regression(
    geometry: &Geometry,
    y: &DVector<f64>,
    l: f64,
    sigma_sq: f64,
    epsilon: f64,
) -> Result<Vec<f64>> {
    if l <= 0.0 || sigma_sq < 0.0 {
        return Err(Error::InvalidParam(
            "need L > 0 and sigma_sq >= 0".to_string(),
        ));
    }
    check_epsilon(epsilon)?;
    let design = geometry
        .design()
        .ok_or_else(|| Error::ModeError("bounded-regression radii need the design".into()))?;
    let n = design.nrows();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "response has length {}, design has {n} rows",
            y.len()
        )));
    }
    let m = geometry.m();
    let lead = 4.0 * (1.0 + (2.0 * m as f64 / epsilon).ln()) / n as f64;
    let mut radii = Vec::with_capacity(m);
    for j in 0..m {
        let moment: f64 = (0..n)
            .map(|i| design[(i, j)].powi(2) * y[i].powi(2))
            .sum::<f64>()
            / n as f64;
        radii.push(lead * (moment + l * l + sigma_sq));
    }
    Ok(radii)
}

/// Squared radii under an almost-surely bounded response |Y| ≤ K:
/// r = 8K²(1 + log(2m/ε))/n for every coordinate.
pub fn radii_lemma_bounded_response(m: usize, n: usize, k: f64, epsilon: f64) -> Result<Vec<f64>> {
    if k <= 0.0 {
        return Err(Error::InvalidParam("need K > 0".to_string()));
    }
    if n == 0 || m == 0 {
        return Err(Error::InvalidParam("need n > 0 and m > 0".to_string()));
    }
    check_epsilon(epsilon)?;
    let r = 8.0 * k * k * (1.0 + (2.0 * m as f64 / epsilon).ln()) / n as f64;
    Ok(vec![r; m])
}

/// The practical constant choice (σ/3)√(log m / n), identical across
/// coordinates. The returned value plays the role of the slab half-width √r
/// under the default interpretation; see [`RadiiKind::HeuristicSigma`].
pub fn radii_heuristic(m: usize, n: usize, sigma: f64) -> Result<Vec<f64>> {
    if sigma <= 0.0 {
        return Err(Error::InvalidParam("need sigma > 0".to_string()));
    }
    if n == 0 || m == 0 {
        return Err(Error::InvalidParam("need n > 0 and m > 0".to_string()));
    }
    let v = sigma / 3.0 * ((m as f64).ln() / n as f64).sqrt();
    Ok(vec![v; m])
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(Error::InvalidParam(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    Ok(())
}

/// Slab centers and squared radii at level ε.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfidenceBand {
    centers: Vec<f64>,
    radii: Vec<f64>,
    epsilon: f64,
}

impl ConfidenceBand {
    pub fn new(centers: Vec<f64>, radii: Vec<f64>, epsilon: f64) -> Result<Self> {
        if centers.len() != radii.len() {
            return Err(Error::DimensionMismatch(format!(
                "centers have length {}, radii {}",
                centers.len(),
                radii.len()
            )));
        }
        if radii.iter().any(|r| *r < 0.0 || !r.is_finite()) {
            return Err(Error::InvalidParam(
                "radii must be finite and >= 0".to_string(),
            ));
        }
        Ok(Self {
            centers,
            radii,
            epsilon,
        })
    }

    /// Centers from the empirical correlations, radii from the policy.
    pub fn from_policy(
        geometry: &Geometry,
        y: &DVector<f64>,
        policy: &RadiiPolicy,
    ) -> Result<Self> {
        let centers = geometry.correlations(y)?;
        let radii = policy.radii(geometry, y)?;
        Self::new(centers.iter().copied().collect(), radii, policy.epsilon)
    }

    pub fn m(&self) -> usize {
        self.centers.len()
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Slab half-width √r(j,ε).
    pub fn threshold(&self, j: usize) -> f64 {
        self.radii[j].sqrt()
    }

    /// |⟨α, e_j⟩_GN − α̃_j| − √r_j for every j; non-positive entries mean the
    /// slab constraint is satisfied.
    pub fn violations(&self, geometry: &Geometry, alpha: &CoefVector) -> Result<Vec<f64>> {
        let coords = geometry.gn_coordinates(alpha)?;
        Ok((0..self.m())
            .map(|j| (coords[j] - self.centers[j]).abs() - self.threshold(j))
            .collect())
    }

    /// True when α lies in every slab within `tol`.
    pub fn is_feasible(&self, geometry: &Geometry, alpha: &CoefVector, tol: f64) -> Result<bool> {
        Ok(self.violations(geometry, alpha)?.iter().all(|v| *v <= tol))
    }
}

/// Orthogonal projection of α onto the single slab CR(j,ε) under ‖·‖_GN.
///
/// With β_j = α̃_j − ⟨α, e_j⟩_GN the projection moves along e_j by the
/// soft-thresholded residual: α' = α + sgn(β_j)(|β_j| − √r_j)₊ e_j on a
/// normalized dictionary (the general step carries a 1/M_jj factor).
pub fn project_single_slab(
    geometry: &Geometry,
    band: &ConfidenceBand,
    j: usize,
    alpha: &CoefVector,
) -> Result<CoefVector> {
    let m = geometry.m();
    if band.m() != m {
        return Err(Error::DimensionMismatch(format!(
            "band has {} slabs, dictionary size is {m}",
            band.m()
        )));
    }
    if j >= m {
        return Err(Error::IndexOutOfRange { index: j, dim: m });
    }
    if alpha.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "coefficient vector has length {}, dictionary size is {m}",
            alpha.len()
        )));
    }
    let diag = geometry.gram()[(j, j)];
    if diag <= 0.0 {
        return Err(Error::ZeroNormColumn(j));
    }
    let coord = geometry.gram().column(j).dot(alpha);
    let residual = band.centers[j] - coord;
    let step = (residual.abs() - band.threshold(j)).max(0.0);
    let mut out = alpha.clone();
    if step > 0.0 {
        out[j] += residual.signum() * step / diag;
    }
    Ok(out)
}
