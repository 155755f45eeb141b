//! The toy-model Monte Carlo study: replicated estimator comparisons on
//! n = 20 Gaussian AR(1) data with the three classic coefficient vectors.
//!
//! Each replication draws a fresh design, normalizes the columns, builds the
//! confidence band, fits every estimator and records the empirical-norm loss
//! ‖α̂ − β_target‖²_n on the realized design (coefficients compared in the
//! original column scale). Replications are keyed by (base_seed, index) so
//! results are bitwise reproducible and independent of the parallelism
//! degree.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::confidence::{ConfidenceBand, RadiiPolicy};
use crate::error::{Error, Result};
use crate::estimators::{
    fit_correlation_selector, fit_dantzig, fit_ifs, fit_lasso, fit_ols, FitReport, Method,
    SolverOptions,
};
use crate::geometry::{CoefVector, Geometry};
use crate::sampling;

/// β¹ = (3, 1.5, 0, 0, 2, 0, 0, 0), the "sparse" scenario.
pub const BETA_SPARSE: [f64; 8] = [3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0];
/// β² = (1.5, …, 1.5), the "non-sparse" scenario.
pub const BETA_NON_SPARSE: [f64; 8] = [1.5; 8];
/// β³ = (5, 0, …, 0), the "very sparse" scenario.
pub const BETA_VERY_SPARSE: [f64; 8] = [5.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Scenario tag used in reports.
    pub label: String,
    pub beta: Vec<f64>,
    /// Noise standard deviation.
    pub sigma: f64,
    /// AR(1) correlation of the design rows, in [0, 1).
    pub rho: f64,
    pub n: usize,
    pub replications: usize,
    /// When set, each replication estimates β̃ = M̂β from the transformed
    /// design X̃ = X·M̂⁻¹ with M̂ = XᵀX/n, so the transformed correlation
    /// vector is sparse and the experiment favors the Correlation Selector.
    #[serde(default)]
    pub transform_gram_inverse: bool,
    pub radii_policy: RadiiPolicy,
    pub base_seed: u64,
    #[serde(default)]
    pub include_dantzig: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.beta.is_empty() {
            return Err(Error::InvalidParam("beta must be non-empty".into()));
        }
        if self.n == 0 || self.replications == 0 {
            return Err(Error::InvalidParam(
                "n and replications must be positive".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::CholeskyFailure(format!(
                "rho must lie in [0, 1), got {}",
                self.rho
            )));
        }
        if !(self.sigma >= 0.0) {
            return Err(Error::InvalidParam("sigma must be >= 0".into()));
        }
        self.radii_policy.validate()
    }

    pub fn methods(&self) -> Vec<Method> {
        let mut methods = vec![
            Method::Ols,
            Method::Lasso,
            Method::Ifs,
            Method::CorrelationSelector,
        ];
        if self.include_dantzig {
            methods.push(Method::Dantzig);
        }
        methods
    }
}

/// Per-method aggregate over the replications.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReplicationStats {
    pub method: Method,
    /// Mean of ‖α̂ − β_target‖²_n over the replications.
    pub mean_loss: f64,
    /// Sample standard deviation of that loss.
    pub sd_loss: f64,
    pub mean_nonzero: f64,
    /// Replications whose solver reported converged = false.
    pub not_converged: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub config: ExperimentConfig,
    pub stats: Vec<ReplicationStats>,
}

/// One draw of the toy model: the design, the response and the coefficient
/// vector the estimators are judged against (β, or M̂β under the transform).
pub fn generate_replication(
    config: &ExperimentConfig,
    replication: u64,
) -> Result<(DMatrix<f64>, DVector<f64>, DVector<f64>)> {
    config.validate()?;
    let m = config.beta.len();
    let sigma_mat = sampling::ar1_covariance(m, config.rho);
    let chol = sigma_mat
        .cholesky()
        .ok_or_else(|| Error::CholeskyFailure("AR(1) covariance".into()))?;
    let mut rng = sampling::replication_rng(config.base_seed, replication);
    let x = sampling::gaussian_rows(&mut rng, config.n, &chol.l());
    let beta = DVector::from_vec(config.beta.clone());
    let noise = DVector::from_fn(config.n, |_, _| {
        rand::Rng::sample::<f64, _>(&mut rng, rand_distr::StandardNormal)
    });
    let y = &x * &beta + noise * config.sigma;

    if config.transform_gram_inverse {
        let gram_hat = x.transpose() * &x / config.n as f64;
        let chol_hat = gram_hat.clone().cholesky().ok_or_else(|| {
            Error::CholeskyFailure("empirical gram is singular; cannot transform".into())
        })?;
        // X̃ = X M̂⁻¹ row by row, i.e. M̂ X̃ᵀ = Xᵀ
        let design = chol_hat.solve(&x.transpose()).transpose();
        let beta_target = gram_hat * beta;
        Ok((design, y, beta_target))
    } else {
        Ok((x, y, beta))
    }
}

struct ReplicationOutcome {
    losses: Vec<f64>,
    nonzeros: Vec<usize>,
    not_converged: Vec<bool>,
}

fn run_replication(config: &ExperimentConfig, replication: u64) -> Result<ReplicationOutcome> {
    let (design, y, beta_target) = generate_replication(config, replication)?;
    let raw = Geometry::from_design(design)?;
    let (geometry, scales) = raw.normalize_columns()?;
    let band = ConfidenceBand::from_policy(&geometry, &y, &config.radii_policy)?;
    let options = SolverOptions::default();

    let mut outcome = ReplicationOutcome {
        losses: Vec::new(),
        nonzeros: Vec::new(),
        not_converged: Vec::new(),
    };
    for method in config.methods() {
        let report: FitReport = match method {
            Method::Ols => fit_ols(&geometry, &y)?,
            Method::Lasso => fit_lasso(&geometry, &band, &options)?,
            Method::Ifs => fit_ifs(&geometry, &band, &options)?,
            Method::CorrelationSelector => fit_correlation_selector(&geometry, &band)?,
            Method::Dantzig => fit_dantzig(&geometry, &band, &options)?,
            Method::RelaxedIfs => unreachable!("not part of the table presets"),
        };
        // back to the original column scale before comparing with the target
        let original = CoefVector::from_fn(geometry.m(), |j, _| report.coefficients[j] / scales[j]);
        let loss = raw.gn_norm_sq(&(&original - &beta_target))?;
        outcome.losses.push(loss);
        outcome.nonzeros.push(report.nonzero_count);
        outcome.not_converged.push(!report.converged);
    }
    Ok(outcome)
}

/// Runs all replications of one scenario, in parallel, and aggregates the
/// per-method loss and sparsity statistics in fixed replication order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ReplicationStats>> {
    config.validate()?;
    let outcomes: Vec<ReplicationOutcome> = (0..config.replications as u64)
        .into_par_iter()
        .map(|rep| run_replication(config, rep))
        .collect::<Result<Vec<_>>>()?;

    let methods = config.methods();
    let reps = config.replications as f64;
    let mut stats = Vec::with_capacity(methods.len());
    for (k, method) in methods.into_iter().enumerate() {
        let losses: Vec<f64> = outcomes.iter().map(|o| o.losses[k]).collect();
        let mean = losses.iter().sum::<f64>() / reps;
        let sd = if config.replications > 1 {
            (losses.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / (reps - 1.0)).sqrt()
        } else {
            0.0
        };
        let mean_nonzero = outcomes.iter().map(|o| o.nonzeros[k] as f64).sum::<f64>() / reps;
        let not_converged = outcomes.iter().filter(|o| o.not_converged[k]).count();
        stats.push(ReplicationStats {
            method,
            mean_loss: mean,
            sd_loss: sd,
            mean_nonzero,
            not_converged,
        });
    }
    Ok(stats)
}

/// Runs a batch of scenarios sequentially (replications inside each scenario
/// run in parallel).
pub fn run_scenarios(configs: &[ExperimentConfig]) -> Result<Vec<ScenarioResult>> {
    configs
        .iter()
        .map(|config| {
            Ok(ScenarioResult {
                config: config.clone(),
                stats: run_experiment(config)?,
            })
        })
        .collect()
}

fn scenario(
    label: &str,
    beta: &[f64],
    sigma: f64,
    rho: f64,
    transform: bool,
    seed: u64,
    index: u64,
    include_dantzig: bool,
) -> ExperimentConfig {
    ExperimentConfig {
        label: label.to_string(),
        beta: beta.to_vec(),
        sigma,
        rho,
        n: 20,
        replications: 250,
        transform_gram_inverse: transform,
        radii_policy: RadiiPolicy::heuristic(sigma, 0.1),
        base_seed: sampling::derive_seed(seed, index),
        include_dantzig,
    }
}

/// The 12 scenarios of the main comparison table: {β¹, β², β³} × σ ∈ {3, 1}
/// × ρ ∈ {0.5, 0.1}, 250 replications each.
pub fn table1_preset(seed: u64, include_dantzig: bool) -> Vec<ExperimentConfig> {
    let betas: [(&str, &[f64]); 3] = [
        ("beta1", &BETA_SPARSE),
        ("beta2", &BETA_NON_SPARSE),
        ("beta3", &BETA_VERY_SPARSE),
    ];
    let mut out = Vec::with_capacity(12);
    let mut index = 0;
    for (name, beta) in betas {
        for (sigma, rho) in [(3.0, 0.5), (1.0, 0.5), (3.0, 0.1), (1.0, 0.1)] {
            let label = format!("{name}/sigma{sigma}/rho{rho}");
            out.push(scenario(
                &label,
                beta,
                sigma,
                rho,
                false,
                seed,
                index,
                include_dantzig,
            ));
            index += 1;
        }
    }
    out
}

/// The transformed-model scenarios: β³, σ ∈ {3, 1} × ρ ∈ {0.5, 0.1}, with
/// the Gram-inverse design transform switched on.
pub fn table2_preset(seed: u64, include_dantzig: bool) -> Vec<ExperimentConfig> {
    let mut out = Vec::with_capacity(4);
    for (index, (sigma, rho)) in [(3.0, 0.5), (1.0, 0.5), (3.0, 0.1), (1.0, 0.1)]
        .into_iter()
        .enumerate()
    {
        let label = format!("beta3-transformed/sigma{sigma}/rho{rho}");
        out.push(scenario(
            &label,
            &BETA_VERY_SPARSE,
            sigma,
            rho,
            true,
            seed,
            100 + index as u64,
            include_dantzig,
        ));
    }
    out
}

/// CSV rendering: one scenario block of three rows (mean/sd/nonzero), one
/// column per method.
pub fn scenarios_to_csv(results: &[ScenarioResult]) -> String {
    let mut out = String::new();
    let methods: Vec<Method> = results
        .first()
        .map(|r| r.config.methods())
        .unwrap_or_default();
    out.push_str("scenario,beta,sigma,rho,transform,statistic");
    for m in &methods {
        out.push(',');
        out.push_str(m.label());
    }
    out.push('\n');
    for result in results {
        let cfg = &result.config;
        let beta_desc = if cfg.beta.as_slice() == BETA_SPARSE {
            "beta1"
        } else if cfg.beta.as_slice() == BETA_NON_SPARSE {
            "beta2"
        } else if cfg.beta.as_slice() == BETA_VERY_SPARSE {
            "beta3"
        } else {
            "custom"
        };
        for (stat, pick) in [("mean_loss", 0usize), ("sd_loss", 1), ("mean_nonzero", 2)] {
            out.push_str(&format!(
                "{},{},{},{},{},{}",
                cfg.label, beta_desc, cfg.sigma, cfg.rho, cfg.transform_gram_inverse, stat
            ));
            for s in &result.stats {
                let v = match pick {
                    0 => s.mean_loss,
                    1 => s.sd_loss,
                    _ => s.mean_nonzero,
                };
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
    }
    out
}
