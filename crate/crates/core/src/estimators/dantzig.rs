//! Dantzig selector: the ℓ₁-minimal point of the slab intersection,
//!
//!   min Σ_j |α_j|  s.t.  |⟨α, e_j⟩_GN − α̃_j| ≤ √r(j,ε)  for all j,
//!
//! solved as a linear program over split variables α = α⁺ − α⁻.

use crate::confidence::ConfidenceBand;
use crate::error::{Error, Result};
use crate::estimators::{check_band, FitReport, Method, SolverOptions};
use crate::geometry::{CoefVector, Geometry};
use crate::simplex::{solve_simplex, DenseLp};

const GAP_TOL: f64 = 1e-8;

pub fn fit_dantzig(
    geometry: &Geometry,
    band: &ConfidenceBand,
    options: &SolverOptions,
) -> Result<FitReport> {
    options.validate()?;
    check_band(geometry, band)?;
    let m = geometry.m();
    let gram = geometry.gram();

    // variables [α⁺, α⁻]; two rows per slab:
    //   M_j(α⁺−α⁻) ≤ α̃_j + √r_j   and   −M_j(α⁺−α⁻) ≤ √r_j − α̃_j
    let mut rows = Vec::with_capacity(2 * m);
    let mut rhs = Vec::with_capacity(2 * m);
    for j in 0..m {
        let t = band.threshold(j);
        let c = band.centers()[j];
        let mut upper = vec![0.0; 2 * m];
        let mut lower = vec![0.0; 2 * m];
        for k in 0..m {
            let g = gram[(j, k)];
            upper[k] = g;
            upper[m + k] = -g;
            lower[k] = -g;
            lower[m + k] = g;
        }
        rows.push(upper);
        rhs.push(c + t);
        rows.push(lower);
        rhs.push(t - c);
    }
    let lp = DenseLp {
        objective: vec![1.0; 2 * m],
        rows,
        rhs,
    };

    let solution = solve_simplex(&lp, options.max_iterations)?;
    if solution.duality_gap > GAP_TOL || solution.dual_infeasibility > GAP_TOL {
        return Err(Error::NotConverged(solution.iterations));
    }

    let alpha = CoefVector::from_fn(m, |j, _| solution.x[j] - solution.x[m + j]);
    let mut report = FitReport::new(alpha, Method::Dantzig);
    report.iterations = solution.iterations;
    Ok(report)
}
