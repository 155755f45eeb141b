//! Slow, independent brute-force solvers used only by the test suite to
//! validate the fast estimators, plus shared instance generators.
//!
//! Everything here is written from scratch against the problem statements;
//! none of it calls into the solver paths it checks.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Independent closed-form projection onto one slab, used by the Dykstra
/// loop below.
fn project_slab(
    gram: &DMatrix<f64>,
    centers: &[f64],
    radii: &[f64],
    j: usize,
    point: &DVector<f64>,
) -> DVector<f64> {
    let coord = gram.row(j).transpose().dot(point);
    let resid = centers[j] - coord;
    let excess = resid.abs() - radii[j].sqrt();
    let mut out = point.clone();
    if excess > 0.0 {
        out[j] += resid.signum() * excess / gram[(j, j)];
    }
    out
}

/// GN-orthogonal projection of `target` onto the intersection of all slabs
/// via Dykstra's alternating-projection scheme. Accurate to roughly 1e-7 in
/// objective for the small instances the tests use.
pub fn qp_project(
    gram: &DMatrix<f64>,
    target: &DVector<f64>,
    centers: &[f64],
    radii: &[f64],
) -> Result<DVector<f64>, String> {
    let m = centers.len();
    assert!(m <= 10, "oracle is exponential-ish; keep m small");
    let mut x = target.clone();
    let mut corrections = vec![DVector::zeros(m); m];
    for _ in 0..200_000 {
        let mut sweep_change = 0.0f64;
        for j in 0..m {
            let w = &x + &corrections[j];
            let projected = project_slab(gram, centers, radii, j, &w);
            corrections[j] = &w - &projected;
            sweep_change = sweep_change.max((&projected - &x).amax());
            x = projected;
        }
        if sweep_change < 1e-12 {
            let feasible = (0..m).all(|j| {
                let coord = gram.row(j).transpose().dot(&x);
                (coord - centers[j]).abs() <= radii[j].sqrt() + 1e-8
            });
            if feasible {
                return Ok(x);
            }
        }
    }
    Err("dykstra projection did not converge".to_string())
}

/// Exact ℓ₁ minimizer over the slab polytope by enumerating every candidate
/// basic point: all choices of m active hyperplanes among the 2m slab faces
/// and the m coordinate planes {α_j = 0}. Requires a nonsingular Gram
/// matrix (otherwise the polytope is unbounded and the oracle declines).
pub fn lp_vertex_enumerate(
    gram: &DMatrix<f64>,
    centers: &[f64],
    radii: &[f64],
) -> Result<DVector<f64>, String> {
    let m = centers.len();
    assert!(m <= 6, "candidate count grows as C(3m, m)");
    let svd = gram.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= 1e-12 * smax {
        return Err("UnboundedPolytope: gram matrix is singular".to_string());
    }

    // hyperplane list: (normal row, rhs)
    let mut normals: Vec<DVector<f64>> = Vec::with_capacity(3 * m);
    let mut rhs: Vec<f64> = Vec::with_capacity(3 * m);
    for j in 0..m {
        let row = gram.row(j).transpose();
        normals.push(row.clone());
        rhs.push(centers[j] + radii[j].sqrt());
        normals.push(row);
        rhs.push(centers[j] - radii[j].sqrt());
    }
    for j in 0..m {
        normals.push(DVector::from_fn(m, |i, _| if i == j { 1.0 } else { 0.0 }));
        rhs.push(0.0);
    }

    let mut best: Option<(f64, DVector<f64>)> = None;
    let mut chosen = vec![0usize; m];
    enumerate_subsets(normals.len(), m, 0, 0, &mut chosen, &mut |subset| {
        let mut a = DMatrix::zeros(m, m);
        let mut b = DVector::zeros(m);
        for (row, &h) in subset.iter().enumerate() {
            for c in 0..m {
                a[(row, c)] = normals[h][c];
            }
            b[row] = rhs[h];
        }
        let lu = a.full_piv_lu();
        let Some(alpha) = lu.solve(&b) else {
            return;
        };
        // solve() can return garbage for near-singular systems; verify
        let mut residual = 0.0f64;
        for (row, &h) in subset.iter().enumerate() {
            let _ = row;
            residual = residual.max((normals[h].dot(&alpha) - rhs[h]).abs());
        }
        if residual > 1e-7 {
            return;
        }
        for j in 0..m {
            let coord = gram.row(j).transpose().dot(&alpha);
            if (coord - centers[j]).abs() > radii[j].sqrt() + 1e-9 {
                return;
            }
        }
        let l1: f64 = alpha.iter().map(|v| v.abs()).sum();
        if best.as_ref().map(|(b0, _)| l1 < *b0).unwrap_or(true) {
            best = Some((l1, alpha));
        }
    });
    best.map(|(_, alpha)| alpha)
        .ok_or_else(|| "no feasible basic point found".to_string())
}

/// The penalized objective αᵀMα − 2⟨α, α̃⟩ + 2Σ_j √r_j |α_j|.
pub fn penalized_objective(
    gram: &DMatrix<f64>,
    centers: &[f64],
    radii: &[f64],
    alpha: &DVector<f64>,
) -> f64 {
    let coords = gram * alpha;
    let mut value = 0.0;
    for j in 0..alpha.len() {
        value += alpha[j] * coords[j] - 2.0 * alpha[j] * centers[j]
            + 2.0 * radii[j].sqrt() * alpha[j].abs();
    }
    value
}

/// Brute-force minimum of the penalized objective by nested grid search
/// with repeated refinement around the best cell. Only sensible for m = 3.
pub fn penalized_objective_grid_min(
    gram: &DMatrix<f64>,
    centers: &[f64],
    radii: &[f64],
    half_range: f64,
) -> f64 {
    assert_eq!(centers.len(), 3, "grid oracle is written for m = 3");
    const POINTS: usize = 21;
    let mut center = [0.0f64; 3];
    let mut span = half_range;
    let mut best_value = f64::INFINITY;
    for _ in 0..12 {
        let mut best_point = center;
        for i in 0..POINTS {
            for j in 0..POINTS {
                for k in 0..POINTS {
                    let point = [
                        center[0] - span + 2.0 * span * i as f64 / (POINTS - 1) as f64,
                        center[1] - span + 2.0 * span * j as f64 / (POINTS - 1) as f64,
                        center[2] - span + 2.0 * span * k as f64 / (POINTS - 1) as f64,
                    ];
                    let alpha = DVector::from_row_slice(&point);
                    let value = penalized_objective(gram, centers, radii, &alpha);
                    if value < best_value {
                        best_value = value;
                        best_point = point;
                    }
                }
            }
        }
        center = best_point;
        span *= 2.2 / (POINTS - 1) as f64; // keep neighboring cells inside
    }
    best_value
}

fn enumerate_subsets(
    total: usize,
    want: usize,
    start: usize,
    depth: usize,
    chosen: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if depth == want {
        visit(chosen);
        return;
    }
    for i in start..total {
        if total - i < want - depth {
            break;
        }
        chosen[depth] = i;
        enumerate_subsets(total, want, i + 1, depth + 1, chosen, visit);
    }
}

/// Random empirical geometry with normalized columns.
pub fn random_normalized_geometry(n: usize, m: usize, rng: &mut ChaCha8Rng) -> confreg::Geometry {
    let design = DMatrix::from_fn(n, m, |_, _| rng.sample(rand_distr::StandardNormal));
    let geom = confreg::Geometry::from_design(design).expect("valid design");
    geom.normalize_columns().expect("no zero columns").0
}

/// Random band with centers ~ N(0,1)·scale and squared radii in (0, max_r].
pub fn random_band(
    m: usize,
    center_scale: f64,
    max_r: f64,
    epsilon: f64,
    rng: &mut ChaCha8Rng,
) -> confreg::ConfidenceBand {
    let centers: Vec<f64> = (0..m)
        .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal) * center_scale)
        .collect();
    let radii: Vec<f64> = (0..m)
        .map(|_| (rng.random::<f64>() * 0.95 + 0.05) * max_r)
        .collect();
    confreg::ConfidenceBand::new(centers, radii, epsilon).expect("valid band")
}

/// Draws a uniformly random feasible point of the slab polytope by mapping a
/// random point of the coordinate box through the Gram inverse. Only valid
/// for nonsingular Gram matrices.
pub fn random_feasible_point(
    gram: &DMatrix<f64>,
    centers: &[f64],
    radii: &[f64],
    rng: &mut ChaCha8Rng,
) -> DVector<f64> {
    let m = centers.len();
    let z = DVector::from_fn(m, |j, _| {
        centers[j] + (rng.random::<f64>() * 2.0 - 1.0) * radii[j].sqrt()
    });
    gram.clone()
        .full_piv_lu()
        .solve(&z)
        .expect("nonsingular gram")
}
