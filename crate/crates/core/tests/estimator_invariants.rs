//! Cross-estimator invariants: orthogonal coincidence, feasibility of the
//! slab programs, ℓ₁ dominance, risk equality on rank-deficient Gram
//! matrices, GN-correlation sparsity of the Correlation Selector and the
//! monotone-improvement property of IFS.

mod common;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use confreg::estimators::{
    fit_correlation_selector, fit_dantzig, fit_ifs, fit_lasso, soft_threshold,
};
use confreg::{CoefVector, ConfidenceBand, Geometry, SolverOptions};

fn identity_geometry(m: usize) -> Geometry {
    Geometry::from_gram(DMatrix::identity(m, m)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // On an orthogonal dictionary all four estimators coincide with the
    // closed-form soft threshold of the correlations.
    #[test]
    fn orthogonal_coincidence(
        centers in proptest::collection::vec(-3.0f64..3.0, 2..=8),
        radii_raw in proptest::collection::vec(1e-3f64..1.0, 8),
    ) {
        let m = centers.len();
        let radii: Vec<f64> = radii_raw[..m].to_vec();
        let geom = identity_geometry(m);
        let band = ConfidenceBand::new(centers.clone(), radii.clone(), 0.1).unwrap();
        let opts = SolverOptions::default();

        let expected: Vec<f64> = (0..m)
            .map(|j| soft_threshold(centers[j], radii[j].sqrt()))
            .collect();
        let fits = [
            fit_lasso(&geom, &band, &opts).unwrap(),
            fit_ifs(&geom, &band, &opts).unwrap(),
            fit_dantzig(&geom, &band, &opts).unwrap(),
            fit_correlation_selector(&geom, &band).unwrap(),
        ];
        for fit in &fits {
            for j in 0..m {
                prop_assert!(
                    (fit.coefficients[j] - expected[j]).abs() < 1e-6,
                    "{:?} deviates at {j}: {} vs {}",
                    fit.method, fit.coefficients[j], expected[j]
                );
            }
        }
    }

    // LASSO, Dantzig and C-SEL are all feasible for the slab program.
    #[test]
    fn slab_feasibility(seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let geom = common::random_normalized_geometry(15, 4, &mut rng);
        let band = common::random_band(4, 1.0, 0.3, 0.1, &mut rng);
        let opts = SolverOptions::default();
        for report in [
            fit_lasso(&geom, &band, &opts).unwrap(),
            fit_dantzig(&geom, &band, &opts).unwrap(),
            fit_correlation_selector(&geom, &band).unwrap(),
        ] {
            if report.flags.is_empty() {
                prop_assert!(
                    band.is_feasible(&geom, &report.coefficients_vector(), 1e-6).unwrap(),
                    "{:?} infeasible", report.method
                );
            }
        }
    }
}

#[test]
fn dantzig_l1_never_exceeds_lasso_l1() {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    for _ in 0..100 {
        let geom = common::random_normalized_geometry(18, 5, &mut rng);
        let band = common::random_band(5, 1.0, 0.3, 0.1, &mut rng);
        let opts = SolverOptions::default();
        let ds = fit_dantzig(&geom, &band, &opts).unwrap();
        let lasso = fit_lasso(&geom, &band, &opts).unwrap();
        let l1 = |r: &confreg::FitReport| r.coefficients.iter().map(|v| v.abs()).sum::<f64>();
        assert!(l1(&ds) <= l1(&lasso) + 1e-8);
    }
}

#[test]
fn rank_deficient_lasso_solutions_share_gn_norm() {
    // m > n makes the Gram matrix singular; different coordinate-descent
    // starting points may reach different minimizers, but the GN norm (and
    // hence the risk) of the solution is unique.
    let mut rng = ChaCha8Rng::seed_from_u64(201);
    for trial in 0..25 {
        let design = DMatrix::from_fn(4, 6, |_, _| rng.sample(rand_distr::StandardNormal));
        let geom = Geometry::from_design(design).unwrap();
        let (geom, _) = geom.normalize_columns().unwrap();
        let band = common::random_band(6, 1.0, 0.25, 0.1, &mut rng);
        let cold = fit_lasso(&geom, &band, &SolverOptions::default()).unwrap();
        let warm_point: Vec<f64> = (0..6)
            .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        let warm = fit_lasso(
            &geom,
            &band,
            &SolverOptions {
                warm_start: Some(warm_point),
                ..SolverOptions::default()
            },
        )
        .unwrap();
        if !(cold.converged && warm.converged) {
            continue;
        }
        let n_cold = geom.gn_norm_sq(&cold.coefficients_vector()).unwrap();
        let n_warm = geom.gn_norm_sq(&warm.coefficients_vector()).unwrap();
        assert!(
            (n_cold.sqrt() - n_warm.sqrt()).abs() < 1e-6,
            "trial {trial}: ‖·‖_GN differs: {n_cold} vs {n_warm}"
        );
    }
}

#[test]
fn csel_gn_correlation_support_equals_surviving_thresholds() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for _ in 0..50 {
        let geom = common::random_normalized_geometry(20, 6, &mut rng);
        let band = common::random_band(6, 1.0, 0.4, 0.1, &mut rng);
        let report = fit_correlation_selector(&geom, &band).unwrap();
        if !report.flags.is_empty() {
            continue;
        }
        let coords = geom.gn_coordinates(&report.coefficients_vector()).unwrap();
        let expected = (0..6)
            .filter(|&j| band.centers()[j].abs() > band.radii()[j].sqrt())
            .count();
        let got = coords.iter().filter(|c| c.abs() > 1e-8).count();
        assert_eq!(got, expected);
    }
}

/// Builds a band whose slabs all contain a chosen target vector, so the
/// monotone-improvement property of projections applies deterministically.
fn band_containing(geom: &Geometry, target: &CoefVector, rng: &mut ChaCha8Rng) -> ConfidenceBand {
    let m = geom.m();
    let coords = geom.gn_coordinates(target).unwrap();
    let mut centers = Vec::with_capacity(m);
    let mut radii = Vec::with_capacity(m);
    for j in 0..m {
        let r: f64 = rng.random::<f64>() * 0.2 + 0.01;
        let offset = (rng.random::<f64>() * 2.0 - 1.0) * r.sqrt();
        centers.push(coords[j] + offset);
        radii.push(r);
    }
    ConfidenceBand::new(centers, radii, 0.1).unwrap()
}

#[test]
fn ifs_iterates_never_move_away_from_feasible_targets() {
    let mut rng = ChaCha8Rng::seed_from_u64(203);
    for trial in 0..100 {
        let geom = common::random_normalized_geometry(16, 5, &mut rng);
        let target = DVector::from_fn(5, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
        let band = band_containing(&geom, &target, &mut rng);
        let report = fit_ifs(&geom, &band, &SolverOptions::default()).unwrap();
        assert!(report.converged, "trial {trial} did not converge");

        // replay the trace: distance to the target is non-increasing and the
        // squared steps are dominated by the initial squared distance
        let mut alpha = CoefVector::zeros(5);
        let mut dist = geom.gn_norm_sq(&(&alpha - &target)).unwrap();
        let initial = dist;
        let mut step_sq_sum = 0.0;
        for step in report.trace.as_ref().unwrap() {
            alpha[step.index] += step.delta;
            let next = geom.gn_norm_sq(&(&alpha - &target)).unwrap();
            assert!(
                next.sqrt() <= dist.sqrt() + 1e-8,
                "trial {trial}: distance increased {dist} -> {next}"
            );
            step_sq_sum += step.step * step.step;
            assert!(
                next <= initial - step_sq_sum + 1e-8,
                "trial {trial}: pythagoras chain violated"
            );
            dist = next;
        }
    }
}

#[test]
fn ifs_step_sizes_match_iterate_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(204);
    let geom = common::random_normalized_geometry(20, 6, &mut rng);
    let band = common::random_band(6, 1.5, 0.1, 0.1, &mut rng);
    let report = fit_ifs(&geom, &band, &SolverOptions::default()).unwrap();
    let mut alpha = CoefVector::zeros(6);
    for step in report.trace.as_ref().unwrap() {
        let mut next = alpha.clone();
        next[step.index] += step.delta;
        let gn = geom.gn_norm_sq(&(&next - &alpha)).unwrap().sqrt();
        assert!((gn - step.step).abs() < 1e-10);
        assert!(step.step >= 0.0);
        alpha = next;
    }
}
