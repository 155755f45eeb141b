//! Command-line front end: fit estimators on CSV data, run the Monte Carlo
//! presets and check oracle-bound coverage.
//!
//! Exit codes: 0 success, 2 input/configuration error, 3 solver did not
//! converge.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use confreg::confidence::{ConfidenceBand, RadiiKind, RadiiPolicy};
use confreg::error::Error;
use confreg::estimators::{
    fit_correlation_selector, fit_dantzig, fit_ifs, fit_ifs_relaxed, fit_lasso, fit_ols, FitReport,
    Method, SolverOptions,
};
use confreg::geometry::{CoefVector, Geometry};
use confreg::oracle::{check_oracle_coverage, BoundTheorem, CoverageConfig, CoverageDesign};
use confreg::simulate::{
    run_scenarios, scenarios_to_csv, table1_preset, table2_preset, ExperimentConfig,
};
use confreg::{io, sampling};

#[derive(Parser)]
#[command(
    name = "confreg",
    version,
    about = "Confidence-slab projection estimators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one estimator on a design/response pair from CSV files.
    Fit(FitArgs),
    /// Run a replicated estimator-comparison experiment to CSV.
    Simulate(SimulateArgs),
    /// Monte Carlo check of an oracle bound's coverage.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Ols,
    Lasso,
    Ifs,
    IfsRelaxed,
    Dantzig,
    Cs,
}

impl From<MethodArg> for Method {
    fn from(value: MethodArg) -> Self {
        match value {
            MethodArg::Ols => Method::Ols,
            MethodArg::Lasso => Method::Lasso,
            MethodArg::Ifs => Method::Ifs,
            MethodArg::IfsRelaxed => Method::RelaxedIfs,
            MethodArg::Dantzig => Method::Dantzig,
            MethodArg::Cs => Method::CorrelationSelector,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RadiiArg {
    Lemma21,
    Lemma22,
    Heuristic,
    Const,
}

#[derive(Args)]
struct FitArgs {
    /// Design matrix CSV, one sample per row.
    #[arg(long)]
    design: PathBuf,
    /// Response CSV, one value per row.
    #[arg(long)]
    response: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Radii recipe (not needed for OLS).
    #[arg(long, value_enum)]
    radii: Option<RadiiArg>,
    /// Noise standard deviation (heuristic radii).
    #[arg(long)]
    sigma: Option<f64>,
    /// Sup-norm bound L on the regression function (lemma21 radii).
    #[arg(long, alias = "L")]
    l: Option<f64>,
    /// Noise variance bound (lemma21 radii).
    #[arg(long)]
    sigma_sq: Option<f64>,
    /// Almost-sure response bound K (lemma22 radii).
    #[arg(long, alias = "K")]
    k: Option<f64>,
    /// Constant squared radius (const radii).
    #[arg(long)]
    r: Option<f64>,
    /// Confidence level.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Treat the heuristic value as the squared radius instead of the slab
    /// half-width.
    #[arg(long)]
    as_squared_radius: bool,
    /// IFS stopping threshold.
    #[arg(long, default_value_t = 1e-6)]
    kappa: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    /// Coordinate-descent convergence tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// The CSV files carry a header row.
    #[arg(long)]
    has_header: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Built-in scenario grid.
    #[arg(long, value_enum, conflicts_with = "config")]
    preset: Option<PresetArg>,
    /// Scenario list from a JSON file (single object or array).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed for the preset scenarios (configs from --config carry
    /// their own base_seed).
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Also write the full results as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    include_dantzig: bool,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PresetArg {
    Table1,
    Table2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BoundArg {
    Thm32,
    Thm33,
    Thm34,
    Thm34Gn,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DesignArg {
    Orthogonal,
    Ar1,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    bound: BoundArg,
    #[arg(long, value_enum, default_value_t = MethodArg::Lasso)]
    estimator: MethodArg,
    #[arg(long, default_value_t = 500)]
    replications: usize,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, value_enum, default_value_t = DesignArg::Orthogonal)]
    design: DesignArg,
    #[arg(long, default_value_t = 0.1)]
    rho: f64,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 8)]
    m: usize,
    /// Data-generating coefficients, comma separated (defaults to the sparse
    /// toy vector padded or truncated to m).
    #[arg(long)]
    beta: Option<String>,
    /// Half-width of the uniform noise.
    #[arg(long, default_value_t = 1.0)]
    noise: f64,
    #[arg(long)]
    d_constant: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Also write the report as a CSV row.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct FitDiagnostics {
    /// Column scales applied before fitting; reported coefficients are in
    /// the original column scale.
    scales: Vec<f64>,
    /// |⟨α̂, e_j⟩_GN − α̃_j| − √r_j per coordinate (normalized dictionary);
    /// non-positive means the slab holds.
    constraint_violations: Option<Vec<f64>>,
    feasible: Option<bool>,
}

#[derive(Serialize)]
struct FitOutput {
    report: FitReport,
    diagnostics: FitDiagnostics,
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Fit(args) => run_fit(&args),
        Command::Simulate(args) => run_simulate(&args),
        Command::Verify(args) => run_verify(&args),
    };
    std::process::exit(code);
}

/// Prints to stdout, tolerating a closed pipe (e.g. `confreg ... | head`).
fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::NotConverged(_) => 3,
        _ => 2,
    }
}

fn fail(err: Error) -> i32 {
    eprintln!("error: {err}");
    exit_code_for(&err)
}

fn build_policy(args: &FitArgs) -> Result<RadiiPolicy, Error> {
    let kind = match args.radii {
        None => {
            return Err(Error::InvalidParam(
                "--radii is required for this method".into(),
            ))
        }
        Some(RadiiArg::Lemma21) => RadiiKind::LemmaBoundedRegression {
            l: args
                .l
                .ok_or_else(|| Error::InvalidParam("--l is required for lemma21 radii".into()))?,
            sigma_sq: args.sigma_sq.ok_or_else(|| {
                Error::InvalidParam("--sigma-sq is required for lemma21 radii".into())
            })?,
        },
        Some(RadiiArg::Lemma22) => RadiiKind::LemmaBoundedResponse {
            k: args
                .k
                .ok_or_else(|| Error::InvalidParam("--k is required for lemma22 radii".into()))?,
        },
        Some(RadiiArg::Heuristic) => RadiiKind::HeuristicSigma {
            sigma: args.sigma.ok_or_else(|| {
                Error::InvalidParam("--sigma is required for heuristic radii".into())
            })?,
            as_squared_radius: args.as_squared_radius,
        },
        Some(RadiiArg::Const) => RadiiKind::Constant {
            value: args
                .r
                .ok_or_else(|| Error::InvalidParam("--r is required for const radii".into()))?,
        },
    };
    Ok(RadiiPolicy {
        kind,
        epsilon: args.epsilon,
    })
}

fn run_fit(args: &FitArgs) -> i32 {
    match try_fit(args) {
        Ok((output, converged)) => {
            emit(&serde_json::to_string_pretty(&output).expect("report serializes"));
            if converged {
                0
            } else {
                3
            }
        }
        Err(err) => fail(err),
    }
}

fn try_fit(args: &FitArgs) -> Result<(FitOutput, bool), Error> {
    let design = io::load_design_csv(args.design.to_str().unwrap_or_default(), args.has_header)?;
    let y = io::load_response_csv(args.response.to_str().unwrap_or_default(), args.has_header)?;
    let raw = Geometry::from_design(design)?;
    let (geometry, scales) = raw.normalize_columns()?;
    let method: Method = args.method.into();
    let options = SolverOptions {
        max_iterations: args.max_iter,
        tolerance: args.tol,
        kappa: args.kappa,
        ..SolverOptions::default()
    };

    let (mut report, band) = if method == Method::Ols {
        (fit_ols(&geometry, &y)?, None)
    } else {
        let policy = build_policy(args)?;
        let band = ConfidenceBand::from_policy(&geometry, &y, &policy)?;
        let report = match method {
            Method::Lasso => fit_lasso(&geometry, &band, &options)?,
            Method::Ifs => fit_ifs(&geometry, &band, &options)?,
            Method::RelaxedIfs => fit_ifs_relaxed(&geometry, &band, &options)?,
            Method::Dantzig => fit_dantzig(&geometry, &band, &options)?,
            Method::CorrelationSelector => fit_correlation_selector(&geometry, &band)?,
            Method::Ols => unreachable!(),
        };
        (report, Some(band))
    };

    let normalized = report.coefficients_vector();
    let (violations, feasible) = match &band {
        Some(b) => {
            let v = b.violations(&geometry, &normalized)?;
            let ok = v.iter().all(|x| *x <= 1e-6);
            (Some(v), Some(ok))
        }
        None => (None, None),
    };
    // report coefficients on the original column scale
    let original = CoefVector::from_fn(geometry.m(), |j, _| normalized[j] / scales[j]);
    report.coefficients = original.iter().copied().collect();
    let converged = report.converged;

    Ok((
        FitOutput {
            report,
            diagnostics: FitDiagnostics {
                scales,
                constraint_violations: violations,
                feasible,
            },
        },
        converged,
    ))
}

fn run_simulate(args: &SimulateArgs) -> i32 {
    match try_simulate(args) {
        Ok(()) => 0,
        Err(err) => fail(err),
    }
}

fn try_simulate(args: &SimulateArgs) -> Result<(), Error> {
    let configs: Vec<ExperimentConfig> = match (&args.preset, &args.config) {
        (Some(PresetArg::Table1), None) => table1_preset(args.seed, args.include_dantzig),
        (Some(PresetArg::Table2), None) => table2_preset(args.seed, args.include_dantzig),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.display().to_string(),
                msg: e.to_string(),
            })?;
            let mut configs: Vec<ExperimentConfig> = serde_json::from_str::<Vec<_>>(&text)
                .or_else(|_| serde_json::from_str(&text).map(|c: ExperimentConfig| vec![c]))
                .map_err(|e| Error::Io {
                    path: path.display().to_string(),
                    msg: format!("not a valid experiment config: {e}"),
                })?;
            if args.include_dantzig {
                for c in &mut configs {
                    c.include_dantzig = true;
                }
            }
            configs
        }
        (None, None) => {
            return Err(Error::InvalidParam(
                "one of --preset or --config is required".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    for c in &configs {
        c.validate()?;
    }

    let results = run_in_pool(args.jobs, || run_scenarios(&configs))?;

    let csv = scenarios_to_csv(&results);
    std::fs::write(&args.out, csv).map_err(|e| Error::Io {
        path: args.out.display().to_string(),
        msg: e.to_string(),
    })?;
    if let Some(json_path) = &args.json {
        let json = serde_json::to_string_pretty(&results).expect("results serialize");
        std::fs::write(json_path, json).map_err(|e| Error::Io {
            path: json_path.display().to_string(),
            msg: e.to_string(),
        })?;
    }

    for result in &results {
        let line: Vec<String> = result
            .stats
            .iter()
            .map(|s| format!("{}={:.3}", s.method, s.mean_loss))
            .collect();
        emit(&format!("{}: {}", result.config.label, line.join(" ")));
    }
    Ok(())
}

fn run_verify(args: &VerifyArgs) -> i32 {
    match try_verify(args) {
        Ok(report) => {
            if let Some(path) = &args.csv {
                if let Err(e) = std::fs::write(path, report.to_csv()) {
                    return fail(Error::Io {
                        path: path.display().to_string(),
                        msg: e.to_string(),
                    });
                }
            }
            emit(&serde_json::to_string_pretty(&report).expect("report serializes"));
            0
        }
        Err(err) => fail(err),
    }
}

fn try_verify(args: &VerifyArgs) -> Result<confreg::oracle::CoverageReport, Error> {
    let beta = match &args.beta {
        Some(text) => text
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParam(format!("'{f}' in --beta is not a number")))
            })
            .collect::<Result<Vec<f64>, Error>>()?,
        None => {
            let base = confreg::simulate::BETA_SPARSE;
            (0..args.m).map(|j| base[j % base.len()]).collect()
        }
    };
    if beta.len() != args.m {
        return Err(Error::InvalidParam(format!(
            "--beta has {} entries, --m is {}",
            beta.len(),
            args.m
        )));
    }
    let design = match args.design {
        DesignArg::Orthogonal => CoverageDesign::Orthogonal {
            n: args.n,
            m: args.m,
        },
        DesignArg::Ar1 => CoverageDesign::Ar1Gaussian {
            n: args.n,
            m: args.m,
            rho: args.rho,
        },
    };
    let bound = match args.bound {
        BoundArg::Thm32 => BoundTheorem::Thm32Orthogonal,
        BoundArg::Thm33 => BoundTheorem::Thm33RestrictedEig,
        BoundArg::Thm34 => BoundTheorem::Thm34CsNorm,
        BoundArg::Thm34Gn => BoundTheorem::Thm34GnNorm,
    };
    let config = CoverageConfig {
        design,
        design_seed: sampling::derive_seed(args.seed, u64::MAX),
        beta,
        noise_halfwidth: args.noise,
        epsilon: args.epsilon,
        replications: args.replications,
        base_seed: args.seed,
        estimator: args.estimator.into(),
        bound,
        d_constant: args.d_constant,
    };
    run_in_pool(args.jobs, || check_oracle_coverage(&config))
}

fn run_in_pool<T>(jobs: usize, task: impl FnOnce() -> Result<T, Error> + Send) -> Result<T, Error>
where
    T: Send,
{
    if jobs == 0 {
        return task();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParam(format!("cannot build thread pool: {e}")))?;
    pool.install(task)
}
