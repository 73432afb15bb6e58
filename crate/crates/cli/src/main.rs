//! Command-line entry points for heteroscedasticity testing and the
//! simulation harness.

mod errors;
mod io;
mod report;

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use drmat::harness::{bandwidth_sweep, dimension_sweep, power_curve_a, rejection_rate};
use drmat::hypothesis::{drmat_pipeline, run_test, Method, TestConfig};
use drmat::scenarios::{CovarianceKind, ErrorLaw, ExampleId, ScenarioSpec};
use drmat::smoothing::bandwidth_multiplier_grid;
use drmat::{RateRow, TestResult};

use errors::{CliError, CliResult};
use report::{Envelope, Meta, RowsReport, TestReport};

#[derive(Parser)]
#[command(
    name = "drmat",
    version,
    about = "Dimension-reduction model-adaptive heteroscedasticity testing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run heteroscedasticity tests on a CSV dataset
    Test(TestArgs),
    /// Empirical rejection rates for one simulated scenario
    Simulate(SimulateArgs),
    /// Rejection rates over a grid of variance-inflation values
    PowerCurve(PowerCurveArgs),
    /// Rejection rates over a grid of covariate dimensions
    DimSweep(DimSweepArgs),
    /// Rejection rates over a grid of bandwidth multipliers
    BwSweep(BwSweepArgs),
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}

fn parse_example(s: &str) -> Result<ExampleId, String> {
    match s {
        "ex1" => Ok(ExampleId::Ex1),
        "ex2" => Ok(ExampleId::Ex2),
        "ex3" => Ok(ExampleId::Ex3),
        "local" => Ok(ExampleId::Local),
        other => Err(format!("unknown example `{other}` (ex1|ex2|ex3|local)")),
    }
}

fn parse_covariance(s: &str) -> Result<CovarianceKind, String> {
    match s {
        "sigma1" => Ok(CovarianceKind::Sigma1),
        "sigma2" => Ok(CovarianceKind::Sigma2),
        other => Err(format!("unknown covariance `{other}` (sigma1|sigma2)")),
    }
}

fn parse_error_law(s: &str) -> Result<ErrorLaw, String> {
    match s {
        "std-normal" | "std_normal" => Ok(ErrorLaw::StdNormal),
        "student-t6" | "student_t6" => Ok(ErrorLaw::StudentT6),
        other => Err(format!(
            "unknown error law `{other}` (std-normal|student-t6)"
        )),
    }
}

#[derive(Args, Clone)]
struct CommonTuning {
    /// Bandwidth multipliers of the n^{-1/(4+d)} rate for the pair
    /// statistic; repeat the flag to evaluate several
    #[arg(long = "h-mult", default_values_t = vec![1.25])]
    h_mult: Vec<f64>,

    /// Constant of the mean-estimation bandwidth rule
    #[arg(long = "h1-const", default_value_t = 1.0)]
    h1_const: f64,

    /// Ridge-constant override for the dimension selection
    #[arg(long = "c-n")]
    c_n: Option<f64>,

    /// Wild-bootstrap replicates for the marked-process tests
    #[arg(long = "boot-reps", default_value_t = 500)]
    boot_reps: usize,

    /// Master seed; HET_SEED is the fallback when the flag is absent
    #[arg(long, env = "HET_SEED", default_value_t = 0)]
    seed: u64,
}

impl CommonTuning {
    fn config(&self, h_multiplier: f64) -> TestConfig {
        TestConfig {
            h_multiplier,
            h1_constant: self.h1_const,
            c_n: self.c_n,
            boot_reps: self.boot_reps,
            seed: self.seed,
            ..TestConfig::default()
        }
    }
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output path; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,

    /// Report format
    #[arg(long, default_value = "json", value_parser = ["json", "csv"])]
    format: String,
}

#[derive(Args)]
struct TestArgs {
    /// Input CSV file (UTF-8, comma-separated, header row)
    #[arg(long)]
    input: PathBuf,

    /// Response column, by name or 0-based index
    #[arg(long)]
    response: String,

    /// Covariate columns, comma-separated names or 0-based indices
    #[arg(long, value_delimiter = ',')]
    covariates: Vec<String>,

    /// Tests to run; repeat the flag for several
    #[arg(long, value_parser = parse_method, default_values = ["drmat"])]
    method: Vec<Method>,

    /// Nominal level used for the printed reject/accept summary
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,

    /// Event distances in meters aligned with [response, covariates...];
    /// nonzero entries convert that column from winning times to speeds
    /// (seconds up to 400 m, minutes beyond)
    #[arg(long, value_delimiter = ',')]
    distances: Option<Vec<f64>>,

    #[command(flatten)]
    tuning: CommonTuning,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SimulateArgs {
    /// Simulation design
    #[arg(long, value_parser = parse_example)]
    example: ExampleId,

    /// Sample size
    #[arg(long)]
    n: usize,

    /// Number of covariates
    #[arg(long)]
    p: usize,

    /// Variance-inflation parameter
    #[arg(long, default_value_t = 0.0)]
    a: f64,

    /// Covariate covariance structure
    #[arg(long = "cov", value_parser = parse_covariance, default_value = "sigma1")]
    covariance: CovarianceKind,

    /// Error law override (defaults to the example's canonical law)
    #[arg(long = "error", value_parser = parse_error_law)]
    error: Option<ErrorLaw>,

    /// Tests to run; repeat the flag for several
    #[arg(long, value_parser = parse_method, default_values = ["drmat"])]
    method: Vec<Method>,

    /// Nominal levels; repeat the flag for several
    #[arg(long, default_values_t = vec![0.05])]
    alpha: Vec<f64>,

    /// Monte Carlo replications
    #[arg(long, default_value_t = 500)]
    reps: u64,

    #[command(flatten)]
    tuning: CommonTuning,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct PowerCurveArgs {
    #[command(flatten)]
    scenario: SimulateArgs,

    /// Grid of variance-inflation values
    #[arg(long = "a-grid", value_delimiter = ',', default_value = "0,0.2,0.4,0.6,0.8,1.0")]
    a_grid: Vec<f64>,
}

#[derive(Args)]
struct DimSweepArgs {
    /// Sample size
    #[arg(long)]
    n: usize,

    /// Variance-inflation parameter
    #[arg(long, default_value_t = 1.0)]
    a: f64,

    /// Grid of covariate dimensions (single-index design)
    #[arg(long = "p-grid", value_delimiter = ',', default_value = "2,4,6,8,10,12")]
    p_grid: Vec<usize>,

    /// Tests to run; repeat the flag for several
    #[arg(long, value_parser = parse_method, default_values = ["drmat", "zheng"])]
    method: Vec<Method>,

    /// Nominal level
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,

    /// Monte Carlo replications per grid point
    #[arg(long, default_value_t = 200)]
    reps: u64,

    #[command(flatten)]
    tuning: CommonTuning,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct BwSweepArgs {
    #[command(flatten)]
    scenario: SimulateArgs,

    /// Grid of bandwidth multipliers (defaults to 0.5, 0.75, ..., 1.75)
    #[arg(long, value_delimiter = ',')]
    multipliers: Option<Vec<f64>>,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Test(args) => cmd_test(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::PowerCurve(args) => cmd_power_curve(args),
        Command::DimSweep(args) => cmd_dim_sweep(args),
        Command::BwSweep(args) => cmd_bw_sweep(args),
    };
    if let Err(e) = outcome {
        eprintln!("{}", e.to_json());
        std::process::exit(e.exit_code());
    }
}

fn validate_alpha(alpha: f64) -> CliResult<()> {
    if alpha <= 0.0 || alpha >= 1.0 || alpha.is_nan() {
        return Err(CliError::Usage(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(())
}

fn write_report<R: serde::Serialize>(
    output: &OutputArgs,
    envelope: &Envelope<R>,
    rows: Option<&[RateRow]>,
    results: Option<&[TestResult]>,
) -> CliResult<()> {
    let mut sink: Box<dyn Write> = match &output.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(std::io::stdout().lock()),
    };
    match output.format.as_str() {
        "json" => report::write_json(sink.as_mut(), envelope)?,
        "csv" => {
            if let Some(rows) = rows {
                report::write_rows_csv(sink.as_mut(), rows)?;
            } else if let Some(results) = results {
                report::write_results_csv(sink.as_mut(), results)?;
            }
        }
        other => return Err(CliError::Usage(format!("unknown format `{other}`"))),
    }
    Ok(())
}

fn residuals_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    out.with_file_name(format!("{stem}_residuals.csv"))
}

fn cmd_test(args: TestArgs) -> CliResult<()> {
    validate_alpha(args.alpha)?;
    if args.method.is_empty() {
        return Err(CliError::Usage("at least one method is required".into()));
    }
    for &m in &args.tuning.h_mult {
        if m <= 0.0 || m.is_nan() {
            return Err(CliError::Usage(format!(
                "bandwidth multiplier must be positive, got {m}"
            )));
        }
    }

    let start = Instant::now();
    let mut data = io::load_csv(&args.input, &args.response, &args.covariates)?;
    if let Some(distances) = &args.distances {
        data = io::convert_dataset_to_speeds(data, distances)?;
    }

    // the adaptive pipeline supplies the dimension estimate, basis, and
    // residual export shared by the whole report
    let pipeline = drmat_pipeline(&data, &args.tuning.config(args.tuning.h_mult[0]))
        .map_err(CliError::from)?;

    let mut results = Vec::new();
    for &method in &args.method {
        let mults: &[f64] = match method {
            // the marked-process tests take no pair bandwidth
            Method::Zfn | Method::ZfnLow => &args.tuning.h_mult[0..1],
            _ => &args.tuning.h_mult,
        };
        for &m in mults {
            let result =
                run_test(method, &data, &args.tuning.config(m)).map_err(CliError::from)?;
            results.push(result);
        }
    }

    let basis = &pipeline.basis.basis;
    let test_report = TestReport {
        input: args.input.display().to_string(),
        n: data.n(),
        p: data.p(),
        response: args.response.clone(),
        covariates: args.covariates.clone(),
        qhat: pipeline.basis.qhat,
        basis: (0..basis.nrows())
            .map(|i| (0..basis.ncols()).map(|j| basis[(i, j)]).collect())
            .collect(),
        eigenvalues: pipeline.basis.eigenvalues.iter().cloned().collect(),
        results: results.clone(),
    };
    let config = json!({
        "command": "test",
        "input": args.input,
        "response": args.response,
        "covariates": args.covariates,
        "methods": args.method,
        "h_mult": args.tuning.h_mult,
        "h1_const": args.tuning.h1_const,
        "c_n": args.tuning.c_n,
        "boot_reps": args.tuning.boot_reps,
        "alpha": args.alpha,
        "distances": args.distances,
    });
    let envelope = Envelope {
        meta: Meta::new(args.tuning.seed, config, start.elapsed().as_millis() as u64),
        report: test_report,
    };
    write_report(&args.output, &envelope, None, Some(&results))?;

    if let Some(out) = &args.output.out {
        let residuals: Vec<f64> = (0..data.n())
            .map(|i| data.y[i] - pipeline.fit.ghat[i])
            .collect();
        let first_index: Vec<f64> = (0..data.n())
            .map(|i| pipeline.fit.reduced[(i, 0)])
            .collect();
        let mut f = File::create(residuals_path(out))?;
        report::write_residuals_csv(&mut f, &residuals, &first_index)?;
    } else {
        for r in &results {
            eprintln!(
                "{}: statistic {:.4}, p-value {:.4}, reject at {}: {}",
                r.method.as_str(),
                r.statistic,
                r.p_value,
                args.alpha,
                r.p_value <= args.alpha
            );
        }
    }
    Ok(())
}

fn scenario_from(args: &SimulateArgs) -> ScenarioSpec {
    let mut spec = ScenarioSpec::new(
        args.example,
        args.n,
        args.p,
        args.a,
        args.covariance,
        args.tuning.seed,
    );
    if let Some(law) = args.error {
        spec.error = law;
    }
    spec
}

fn cmd_simulate(args: SimulateArgs) -> CliResult<()> {
    for &a in &args.alpha {
        validate_alpha(a)?;
    }
    if args.reps == 0 {
        return Err(CliError::Usage("reps must be at least 1".into()));
    }
    let start = Instant::now();
    let spec = scenario_from(&args);
    let cfg = args.tuning.config(args.tuning.h_mult[0]);

    let mut rows = Vec::new();
    for &method in &args.method {
        for &alpha in &args.alpha {
            rows.push(rejection_rate(
                &spec,
                method,
                &cfg,
                alpha,
                args.reps,
                args.tuning.seed,
            ));
        }
    }
    let config = json!({
        "command": "simulate",
        "scenario": spec,
        "methods": args.method,
        "alphas": args.alpha,
        "reps": args.reps,
        "h_mult": args.tuning.h_mult,
        "h1_const": args.tuning.h1_const,
    });
    let envelope = Envelope {
        meta: Meta::new(args.tuning.seed, config, start.elapsed().as_millis() as u64),
        report: RowsReport { rows: rows.clone() },
    };
    write_report(&args.output, &envelope, Some(&rows), None)
}

fn cmd_power_curve(args: PowerCurveArgs) -> CliResult<()> {
    validate_alpha(args.scenario.alpha[0])?;
    let start = Instant::now();
    let spec = scenario_from(&args.scenario);
    let cfg = args.scenario.tuning.config(args.scenario.tuning.h_mult[0]);

    let mut rows = Vec::new();
    for &method in &args.scenario.method {
        let rep = power_curve_a(
            &spec,
            &args.a_grid,
            method,
            &cfg,
            args.scenario.alpha[0],
            args.scenario.reps,
            args.scenario.tuning.seed,
        );
        rows.extend(rep.rows);
    }
    let config = json!({
        "command": "power-curve",
        "scenario": spec,
        "a_grid": args.a_grid,
        "methods": args.scenario.method,
        "alpha": args.scenario.alpha[0],
        "reps": args.scenario.reps,
    });
    let envelope = Envelope {
        meta: Meta::new(
            args.scenario.tuning.seed,
            config,
            start.elapsed().as_millis() as u64,
        ),
        report: RowsReport { rows: rows.clone() },
    };
    write_report(&args.scenario.output, &envelope, Some(&rows), None)
}

fn cmd_dim_sweep(args: DimSweepArgs) -> CliResult<()> {
    validate_alpha(args.alpha)?;
    let start = Instant::now();
    let base = ScenarioSpec::new(
        ExampleId::Ex1,
        args.n,
        2,
        args.a,
        CovarianceKind::Sigma1,
        args.tuning.seed,
    );
    let cfg = args.tuning.config(args.tuning.h_mult[0]);
    let rep = dimension_sweep(
        &base,
        &args.p_grid,
        &args.method,
        &cfg,
        args.alpha,
        args.reps,
        args.tuning.seed,
    );
    let config = json!({
        "command": "dim-sweep",
        "n": args.n,
        "a": args.a,
        "p_grid": args.p_grid,
        "methods": args.method,
        "alpha": args.alpha,
        "reps": args.reps,
    });
    let envelope = Envelope {
        meta: Meta::new(args.tuning.seed, config, start.elapsed().as_millis() as u64),
        report: RowsReport {
            rows: rep.rows.clone(),
        },
    };
    write_report(&args.output, &envelope, Some(&rep.rows), None)
}

fn cmd_bw_sweep(args: BwSweepArgs) -> CliResult<()> {
    validate_alpha(args.scenario.alpha[0])?;
    let start = Instant::now();
    let spec = scenario_from(&args.scenario);
    let cfg = args.scenario.tuning.config(args.scenario.tuning.h_mult[0]);
    let multipliers = args
        .multipliers
        .clone()
        .unwrap_or_else(bandwidth_multiplier_grid);
    let rep = bandwidth_sweep(
        &spec,
        &multipliers,
        args.scenario.method[0],
        &cfg,
        args.scenario.alpha[0],
        args.scenario.reps,
        args.scenario.tuning.seed,
    );
    let config = json!({
        "command": "bw-sweep",
        "scenario": spec,
        "multipliers": multipliers,
        "method": args.scenario.method[0],
        "alpha": args.scenario.alpha[0],
        "reps": args.scenario.reps,
    });
    let envelope = Envelope {
        meta: Meta::new(
            args.scenario.tuning.seed,
            config,
            start.elapsed().as_millis() as u64,
        ),
        report: RowsReport {
            rows: rep.rows.clone(),
        },
    };
    write_report(&args.scenario.output, &envelope, Some(&rep.rows), None)
}
