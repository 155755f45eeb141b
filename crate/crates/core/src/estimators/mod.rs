//! The confidence-region estimators: OLS baseline, LASSO, Iterative Feature
//! Selection (plain and relaxed), the Dantzig selector and the Correlation
//! Selector. Every estimator consumes a [`Geometry`](crate::Geometry) (and
//! a [`ConfidenceBand`](crate::ConfidenceBand) except OLS) and produces a
//! [`FitReport`].
//!
//! All fit functions are pure; concurrent fits may share a geometry.

mod correlation;
mod dantzig;
mod ifs;
mod lasso;
mod ols;

pub use correlation::fit_correlation_selector;
pub use dantzig::fit_dantzig;
pub use ifs::{fit_ifs, fit_ifs_relaxed};
pub use lasso::fit_lasso;
pub use ols::fit_ols;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{nonzero_count, CoefVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Ols,
    Lasso,
    Ifs,
    #[serde(rename = "ifs-relaxed")]
    RelaxedIfs,
    Dantzig,
    #[serde(rename = "cs")]
    CorrelationSelector,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Ols => "ols",
            Method::Lasso => "lasso",
            Method::Ifs => "ifs",
            Method::RelaxedIfs => "ifs-relaxed",
            Method::Dantzig => "dantzig",
            Method::CorrelationSelector => "cs",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "ols" => Ok(Method::Ols),
            "lasso" => Ok(Method::Lasso),
            "ifs" => Ok(Method::Ifs),
            "ifs-relaxed" => Ok(Method::RelaxedIfs),
            "dantzig" => Ok(Method::Dantzig),
            "cs" | "correlation-selector" => Ok(Method::CorrelationSelector),
            other => Err(Error::InvalidParam(format!("unknown method '{other}'"))),
        }
    }
}

/// Degradations that do not abort a fit but the caller should know about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitFlag {
    /// The normal equations were singular; the minimum-Euclidean-norm
    /// minimizer was returned.
    MinNormFallback,
    /// The thresholded correlation vector was not in the range of the Gram
    /// matrix; the least-squares solution was returned.
    RangeDeficient,
}

/// One applied projection step (IFS trace).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TraceStep {
    /// Selected slab index j(k).
    pub index: usize,
    /// ‖α̂(k) − α̂(k−1)‖_GN, the quantity the stopping rule watches.
    pub step: f64,
    /// Signed coefficient change applied at `index`.
    pub delta: f64,
    /// Relaxation factor applied to the predecessor (1 for plain IFS).
    pub gamma: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitReport {
    pub coefficients: Vec<f64>,
    pub method: Method,
    pub iterations: usize,
    pub converged: bool,
    pub nonzero_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceStep>>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub flags: Vec<FitFlag>,
}

impl FitReport {
    pub(crate) fn new(coefficients: CoefVector, method: Method) -> Self {
        let nz = nonzero_count(&coefficients);
        Self {
            coefficients: coefficients.iter().copied().collect(),
            method,
            iterations: 0,
            converged: true,
            nonzero_count: nz,
            trace: None,
            flags: Vec::new(),
        }
    }

    pub fn coefficients_vector(&self) -> CoefVector {
        CoefVector::from_vec(self.coefficients.clone())
    }
}

/// Deciding knobs of the iterative solvers.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Sweep/step cap.
    pub max_iterations: usize,
    /// Convergence tolerance on the coefficient sup-norm change per sweep.
    pub tolerance: f64,
    /// IFS stopping threshold κ on the GN step size.
    pub kappa: f64,
    pub tie_break: TieBreak,
    /// Optional coordinate-descent starting point (LASSO only; IFS always
    /// starts at zero).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub warm_start: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    #[default]
    LowestIndex,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            tolerance: 1e-9,
            kappa: 1e-6,
            tie_break: TieBreak::LowestIndex,
            warm_start: None,
        }
    }
}

impl SolverOptions {
    pub(crate) fn validate(&self) -> crate::error::Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidParam(
                "max_iterations must be positive".into(),
            ));
        }
        if !(self.tolerance > 0.0) || !(self.kappa > 0.0) {
            return Err(Error::InvalidParam(
                "tolerance and kappa must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// sgn(x)·(|x| − t)₊, the soft-thresholding map.
pub fn soft_threshold(x: f64, t: f64) -> f64 {
    let mag = x.abs() - t;
    if mag > 0.0 {
        x.signum() * mag
    } else {
        0.0
    }
}

pub(crate) fn check_band(
    geometry: &crate::geometry::Geometry,
    band: &crate::confidence::ConfidenceBand,
) -> crate::error::Result<()> {
    if band.m() != geometry.m() {
        return Err(Error::DimensionMismatch(format!(
            "band has {} slabs, dictionary size is {}",
            band.m(),
            geometry.m()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soft_threshold_cases() {
        assert_eq!(soft_threshold(2.0, 1.0), 1.0);
        assert_eq!(soft_threshold(-2.0, 1.0), -1.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(3.0, 0.0), 3.0);
    }

    #[test]
    fn method_round_trip() {
        for m in [
            Method::Ols,
            Method::Lasso,
            Method::Ifs,
            Method::RelaxedIfs,
            Method::Dantzig,
            Method::CorrelationSelector,
        ] {
            let parsed: Method = m.label().parse().unwrap();
            assert_eq!(parsed, m);
        }
        assert!("nope".parse::<Method>().is_err());
    }

    #[test]
    fn report_serializes_to_json() {
        let report = FitReport::new(CoefVector::from_vec(vec![1.0, 0.0, -2.0]), Method::Lasso);
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"method\":\"lasso\""));
        assert!(json.contains("\"nonzero_count\":2"));
        let back: FitReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.coefficients, vec![1.0, 0.0, -2.0]);
    }
}
