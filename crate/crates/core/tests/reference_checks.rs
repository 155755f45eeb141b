//! Cross-validation of the fast solvers against the brute-force reference
//! solvers, and sanity checks of the reference solvers themselves.

mod common;

use common::{lp_vertex_enumerate, qp_project, random_band, random_feasible_point};
use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use confreg::estimators::{fit_dantzig, fit_lasso, soft_threshold};
use confreg::{Geometry, SolverOptions};

fn gram_of(geom: &Geometry) -> DMatrix<f64> {
    geom.gram().clone()
}

#[test]
fn qp_project_returns_feasible_target_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let geom = common::random_normalized_geometry(15, 4, &mut rng);
    let gram = gram_of(&geom);
    let band = random_band(4, 1.0, 0.3, 0.1, &mut rng);
    let target = random_feasible_point(&gram, band.centers(), band.radii(), &mut rng);
    let projected = qp_project(&gram, &target, band.centers(), band.radii()).unwrap();
    assert!((&projected - &target).amax() < 1e-9);
}

#[test]
fn qp_project_soft_thresholds_on_identity_gram() {
    let gram = DMatrix::identity(4, 4);
    let centers = [1.7, -0.4, 0.02, -2.5];
    let radii = [0.25, 0.25, 0.04, 1.0];
    let projected = qp_project(&gram, &DVector::zeros(4), &centers, &radii).unwrap();
    for j in 0..4 {
        let expected = soft_threshold(centers[j], radii[j].sqrt());
        assert!((projected[j] - expected).abs() < 1e-8);
    }
}

#[test]
fn qp_project_beats_random_feasible_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let geom = common::random_normalized_geometry(20, 4, &mut rng);
    let gram = gram_of(&geom);
    let band = random_band(4, 1.0, 0.2, 0.1, &mut rng);
    let target = DVector::from_fn(4, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
    let projected = qp_project(&gram, &target, band.centers(), band.radii()).unwrap();
    let objective = |p: &DVector<f64>| {
        let d = p - &target;
        (d.transpose() * &gram * &d)[(0, 0)]
    };
    let obj_star = objective(&projected);
    for _ in 0..1000 {
        let candidate = random_feasible_point(&gram, band.centers(), band.radii(), &mut rng);
        assert!(obj_star <= objective(&candidate) + 1e-8);
    }
}

#[test]
fn single_slab_projection_matches_qp_oracle() {
    // disarm all slabs but one by giving them huge radii; the intersection
    // projector then reduces to the single-slab projection
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for trial in 0..30 {
        let geom = common::random_normalized_geometry(16, 4, &mut rng);
        let band = random_band(4, 1.0, 0.3, 0.1, &mut rng);
        let j = trial % 4;
        let target = DVector::from_fn(4, |_, _| {
            rng.sample::<f64, _>(rand_distr::StandardNormal) * 2.0
        });
        let fast = confreg::confidence::project_single_slab(&geom, &band, j, &target).unwrap();

        let mut radii_one = vec![1e12; 4];
        radii_one[j] = band.radii()[j];
        let oracle = qp_project(geom.gram(), &target, band.centers(), &radii_one).unwrap();
        let d = &fast - &oracle;
        let gap = geom.gn_norm_sq(&d).unwrap();
        assert!(gap < 1e-8, "trial {trial}: GN gap {gap}");
    }
}

#[test]
fn lasso_matches_qp_projection_of_origin() {
    // Both routes compute Π_GN(0 → ∩ CR(j,ε)); agreement validates the
    // coordinate-descent path against the alternating-projection path.
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for trial in 0..100 {
        let geom = common::random_normalized_geometry(12, 3, &mut rng);
        let gram = gram_of(&geom);
        let band = random_band(3, 1.0, 0.25, 0.1, &mut rng);
        let report = fit_lasso(&geom, &band, &SolverOptions::default()).unwrap();
        assert!(report.converged, "trial {trial}: lasso did not converge");
        let alpha = report.coefficients_vector();
        let oracle = qp_project(&gram, &DVector::zeros(3), band.centers(), band.radii()).unwrap();
        let norm_fast = geom.gn_norm_sq(&alpha).unwrap();
        let norm_oracle = geom.gn_norm_sq(&oracle).unwrap();
        assert!(
            (norm_fast - norm_oracle).abs() < 1e-6,
            "trial {trial}: ‖·‖²_GN {norm_fast} vs oracle {norm_oracle}"
        );
        assert!(
            band.is_feasible(&geom, &alpha, 1e-6).unwrap(),
            "trial {trial}: lasso output infeasible"
        );
    }
}

#[test]
fn lasso_objective_matches_grid_search_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for trial in 0..25 {
        let geom = common::random_normalized_geometry(12, 3, &mut rng);
        let gram = gram_of(&geom);
        let band = random_band(3, 1.0, 0.25, 0.1, &mut rng);
        let report = fit_lasso(&geom, &band, &SolverOptions::default()).unwrap();
        let fast = common::penalized_objective(
            &gram,
            band.centers(),
            band.radii(),
            &report.coefficients_vector(),
        );
        let slow = common::penalized_objective_grid_min(&gram, band.centers(), band.radii(), 4.0);
        // the grid can only overshoot the true minimum
        assert!(
            fast <= slow + 1e-6,
            "trial {trial}: objective {fast} vs grid {slow}"
        );
        assert!(
            (fast - slow).abs() < 1e-6,
            "trial {trial}: grid refinement should reach the optimum: {fast} vs {slow}"
        );
    }
}

#[test]
fn vertex_enumeration_matches_hand_built_two_dimensional_case() {
    // slabs: |x - 1| <= 0.5 and |y + 0.25| <= 0.25 on the identity gram;
    // minimal ℓ₁ point is (0.5, 0)
    let gram = DMatrix::identity(2, 2);
    let centers = [1.0, -0.25];
    let radii = [0.25, 0.0625];
    let v = lp_vertex_enumerate(&gram, &centers, &radii).unwrap();
    assert!((v[0] - 0.5).abs() < 1e-10);
    assert!(v[1].abs() < 1e-10);
}

#[test]
fn vertex_enumeration_declines_singular_gram() {
    let mut gram = DMatrix::identity(2, 2);
    gram[(1, 1)] = 0.0;
    let err = lp_vertex_enumerate(&gram, &[0.0, 0.0], &[0.1, 0.1]).unwrap_err();
    assert!(err.contains("UnboundedPolytope"));
}

#[test]
fn dantzig_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut done = 0;
    while done < 100 {
        let geom = common::random_normalized_geometry(12, 3, &mut rng);
        let gram = gram_of(&geom);
        // keep clearly nonsingular instances so the oracle applies
        let svd = gram.clone().svd(false, false);
        if svd.singular_values.min() < 1e-3 {
            continue;
        }
        let band = random_band(3, 1.0, 0.3, 0.1, &mut rng);
        let report = fit_dantzig(&geom, &band, &SolverOptions::default()).unwrap();
        let fast: f64 = report.coefficients.iter().map(|v| v.abs()).sum();
        let oracle_point = lp_vertex_enumerate(&gram, band.centers(), band.radii()).unwrap();
        let oracle: f64 = oracle_point.iter().map(|v| v.abs()).sum();
        assert!(
            (fast - oracle).abs() < 1e-8,
            "instance {done}: ℓ₁ {fast} vs oracle {oracle}"
        );
        done += 1;
    }
}
