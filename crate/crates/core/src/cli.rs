//! Command-line interface.
//!
//! Exit codes: 0 on success, 2 for invalid input (bad flags, unreadable or
//! malformed data, out-of-range parameters), 3 for numerical failure
//! (singular systems, solver non-convergence).

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::Array1;

use crate::data::load_csv;
use crate::error::Error;
use crate::estimators::{EstimatorKind, FitResult, PenaltySpec, Problem};
use crate::orthonormal::{mc_risk, prop4_bound, risk_closed_form, OrthoConfig};
use crate::seed::DEFAULT_SEED;
use crate::simbench::{design_example, run_benchmark};
use crate::tuning::{choose_d_closed_form, choose_d_l1, kfold_cv, TuningGrids};

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

const AFTER_HELP: &str = "\
Input CSV: header row, comma separated, every cell a plain decimal number
(no quotes). The --response column is the outcome; all others are predictors.

Output CSV schemas (--format csv):
  fit       term,standardized,original
  cv        estimator,median_mse_y,se_mse_y,chosen,folds,reps,seed
  simulate  design,estimator,median_mse_y,se_mse_y,median_mse_beta,se_mse_beta,reps,seed
  risk      delta,lambda_o,d,c_d,closed_form,classical,mc_estimate,mc_se,bound,delta_bound
  choose-d  method,d,discriminant,fallback
Standard errors are bootstrap standard errors of the median (1000 resamples).
`chosen` lists the selected tuning parameters as name=value pairs joined by ';'.

Exit codes: 0 success, 2 input or validation error, 3 numerical failure.";

#[derive(Parser, Debug)]
#[command(name = "llasso", version, about = "Liu-type LASSO and shrinkage regression toolkit", after_help = AFTER_HELP)]
pub struct Cli {
    /// Worker threads for parallel sections (default: all cores). Results do
    /// not depend on this value.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fit one estimator and print its coefficients.
    Fit(FitArgs),
    /// Repeated K-fold cross-validation of several estimators.
    Cv(CvArgs),
    /// Monte Carlo benchmark on the built-in simulation examples.
    Simulate(SimulateArgs),
    /// Orthonormal-design risk: closed form, Monte Carlo and upper bound.
    Risk(RiskArgs),
    /// Choose the biasing parameter d for a dataset.
    ChooseD(ChooseDArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
}

#[derive(Args, Debug)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DataArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// Name of the response column.
    #[arg(long)]
    pub response: String,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// ols, ridge, liu, lasso, llasso, enet or genllasso.
    #[arg(long)]
    pub estimator: EstimatorKind,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub d: Option<f64>,
    /// Comma-separated per-coefficient biasing parameters for genllasso.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub d_vector: Option<Vec<f64>>,
    /// Report a non-converged coordinate descent fit with exit code 0.
    #[arg(long)]
    pub allow_nonconverged: bool,
    #[command(flatten)]
    pub output: Output,
}

fn default_estimators() -> Vec<EstimatorKind> {
    EstimatorKind::BENCHMARK.to_vec()
}

#[derive(Args, Debug)]
pub struct CvArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Comma-separated estimator list.
    #[arg(long, value_delimiter = ',', default_values_t = default_estimators())]
    pub estimators: Vec<EstimatorKind>,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 250)]
    pub reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Examples to run, e.g. `1-5` or `1,3`.
    #[arg(long, default_value = "1-5")]
    pub examples: String,
    #[arg(long, value_delimiter = ',', default_values_t = default_estimators())]
    pub estimators: Vec<EstimatorKind>,
    #[arg(long, default_value_t = 250)]
    pub reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Also write every replication's errors to this CSV
    /// (design,estimator,rep,mse_y,mse_beta).
    #[arg(long)]
    pub raw_out: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct RiskArgs {
    /// Standardized means (comma-separated); one row per value.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = vec![0.0, 1.0, 2.0])]
    pub delta: Vec<f64>,
    /// Thresholds (comma-separated).
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 1.0, 2.0])]
    pub lambda_o: Vec<f64>,
    /// Biasing parameters (comma-separated).
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 1.0])]
    pub d: Vec<f64>,
    /// Level of the universal-threshold bound, in (0, 1/2].
    #[arg(long, default_value_t = 0.1)]
    pub delta_bound: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 100_000)]
    pub draws: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum DMethod {
    ClosedForm,
    L1,
    Both,
}

#[derive(Args, Debug)]
pub struct ChooseDArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Elastic-net penalties on the `fit` scale.
    #[arg(long)]
    pub lambda1: f64,
    #[arg(long)]
    pub lambda2: f64,
    /// LASSO penalty for the l1-proximity rule (defaults to --lambda1).
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, value_enum, default_value_t = DMethod::Both)]
    pub method: DMethod,
    #[command(flatten)]
    pub output: Output,
}

/// A failure with its exit code and one-line message.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotPositiveDefinite { .. } | Error::Singular { .. } | Error::DegenerateResidual => EXIT_NUMERIC,
            _ => EXIT_INPUT,
        };
        CliError { code, message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> CliError {
    CliError { code: EXIT_INPUT, message: message.into() }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn emit(output: &Output, text: &str) -> CliResult<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(|e| input_error(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn require(v: Option<f64>, flag: &str, kind: EstimatorKind) -> CliResult<f64> {
    v.ok_or_else(|| input_error(format!("{kind} requires --{flag}")))
}

fn spec_from_args(a: &FitArgs) -> CliResult<PenaltySpec<f64>> {
    let kind = a.estimator;
    let spec = match kind {
        EstimatorKind::Ols => PenaltySpec::Ols,
        EstimatorKind::Ridge => PenaltySpec::ridge(require(a.k, "k", kind)?)?,
        EstimatorKind::Liu => PenaltySpec::liu(require(a.d, "d", kind)?)?,
        EstimatorKind::Lasso => PenaltySpec::lasso(require(a.lambda, "lambda", kind)?)?,
        EstimatorKind::LLasso => PenaltySpec::llasso(require(a.lambda, "lambda", kind)?, require(a.d, "d", kind)?)?,
        EstimatorKind::ENet => {
            PenaltySpec::enet(require(a.lambda1, "lambda1", kind)?, require(a.lambda2, "lambda2", kind)?)?
        }
        EstimatorKind::GenLLasso => {
            let d = a.d_vector.clone().ok_or_else(|| input_error("GenLLASSO requires --d-vector"))?;
            PenaltySpec::gen_llasso(require(a.lambda, "lambda", kind)?, Array1::from(d))?
        }
    };
    Ok(spec)
}

/// `name=value` pairs joined by `;`.
fn params_label(spec: &PenaltySpec<f64>) -> String {
    let p = spec.params();
    if p.is_empty() {
        return "-".into();
    }
    p.iter().map(|(n, v)| format!("{n}={v}")).collect::<Vec<_>>().join(";")
}

fn render_fit(fit: &FitResult<f64>, names: &[String], format: Format) -> String {
    let orig = fit.coef_original();
    let mut s = String::new();
    match format {
        Format::Csv => {
            s.push_str("term,standardized,original\n");
            writeln!(s, "(intercept),{},{}", fit.intercept, fit.intercept_original()).unwrap();
            for (j, name) in names.iter().enumerate() {
                writeln!(s, "{name},{},{}", fit.beta[j], orig[j]).unwrap();
            }
        }
        Format::Table => {
            writeln!(s, "estimator  {}", fit.spec).unwrap();
            writeln!(s, "converged  {} ({} sweeps)", fit.converged, fit.iterations).unwrap();
            writeln!(s, "objective  {:.6e}", fit.objective).unwrap();
            writeln!(s).unwrap();
            let w = names.iter().map(|n| n.len()).max().unwrap_or(0).max(11);
            writeln!(s, "{:<w$} {:>14} {:>14}", "term", "standardized", "original").unwrap();
            writeln!(s, "{:<w$} {:>14.6} {:>14.6}", "(intercept)", fit.intercept, fit.intercept_original()).unwrap();
            for (j, name) in names.iter().enumerate() {
                writeln!(s, "{name:<w$} {:>14.6} {:>14.6}", fit.beta[j], orig[j]).unwrap();
            }
        }
    }
    s
}

pub fn cmd_fit(a: &FitArgs) -> CliResult<()> {
    let spec = spec_from_args(a)?;
    let raw = load_csv::<f64>(&a.data.data, &a.data.response)?;
    let ds = raw.standardize()?;
    let fit = Problem::new(&ds).fit(&spec)?;
    emit(&a.output, &render_fit(&fit, &ds.column_names, a.output.format))?;
    if !fit.converged && !a.allow_nonconverged {
        return Err(CliError {
            code: EXIT_NUMERIC,
            message: format!("coordinate descent did not converge in {} sweeps", fit.iterations),
        });
    }
    Ok(())
}

pub fn cmd_cv(a: &CvArgs) -> CliResult<()> {
    let ds = load_csv::<f64>(&a.data.data, &a.data.response)?;
    let grids = TuningGrids::default();
    let mut s = String::new();
    match a.output.format {
        Format::Csv => s.push_str("estimator,median_mse_y,se_mse_y,chosen,folds,reps,seed\n"),
        Format::Table => {
            writeln!(s, "{}-fold CV, {} repeats, seed {}", a.folds, a.reps, a.seed).unwrap();
            writeln!(s, "{:<10} {:>14} {:>10}  chosen", "estimator", "median MSE_y", "se").unwrap();
        }
    }
    for &kind in &a.estimators {
        let rep = kfold_cv(&ds, kind, &grids, a.folds, a.reps, a.seed)?;
        let chosen = params_label(&rep.selection.chosen);
        match a.output.format {
            Format::Csv => writeln!(
                s,
                "{},{},{},{},{},{},{}",
                kind.label(),
                rep.median_mse,
                rep.se_median,
                chosen,
                a.folds,
                a.reps,
                a.seed
            )
            .unwrap(),
            Format::Table => {
                writeln!(s, "{:<10} {:>14.5} {:>10.5}  {}", kind.label(), rep.median_mse, rep.se_median, chosen).unwrap()
            }
        }
    }
    emit(&a.output, &s)
}

/// Parses `1-5`, `1,3` or mixtures like `1-2,5`.
pub fn parse_examples(spec: &str) -> CliResult<Vec<usize>> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || input_error(format!("invalid example list `{spec}`"));
        if let Some((a, b)) = part.split_once('-') {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(input_error("no examples requested"));
    }
    Ok(out)
}

pub fn cmd_simulate(a: &SimulateArgs) -> CliResult<()> {
    let designs = parse_examples(&a.examples)?
        .into_iter()
        .map(design_example)
        .collect::<crate::Result<Vec<_>>>()?;
    let report = run_benchmark(&designs, &a.estimators, a.reps, a.seed, &TuningGrids::default())?;
    if let Some(path) = &a.raw_out {
        std::fs::write(path, report.raw_csv()).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    }
    let text = match a.output.format {
        Format::Csv => report.to_csv(),
        Format::Table => report.to_table(),
    };
    emit(&a.output, &text)
}

pub fn cmd_risk(a: &RiskArgs) -> CliResult<()> {
    let mut s = String::new();
    let header = "delta,lambda_o,d,c_d,closed_form,classical,mc_estimate,mc_se,bound,delta_bound";
    match a.output.format {
        Format::Csv => writeln!(s, "{header}").unwrap(),
        Format::Table => writeln!(
            s,
            "{:>7} {:>8} {:>5} {:>12} {:>12} {:>12} {:>10} {:>12}",
            "delta", "lambda_o", "d", "closed_form", "classical", "monte_carlo", "mc_se", "bound"
        )
        .unwrap(),
    }
    for &delta in &a.delta {
        for &l in &a.lambda_o {
            for &d in &a.d {
                let cfg = OrthoConfig::new(vec![delta], l, d, a.sigma, a.delta_bound)?;
                let unit = OrthoConfig { d: 1.0, ..cfg.clone() };
                let exact = risk_closed_form(&cfg);
                let classical = risk_closed_form(&unit);
                let mc = mc_risk(&cfg, a.draws, a.seed)?;
                let bound = prop4_bound(&cfg)[0];
                match a.output.format {
                    Format::Csv => writeln!(
                        s,
                        "{delta},{l},{d},{},{exact},{classical},{},{},{bound},{}",
                        cfg.c_d(),
                        mc.estimate,
                        mc.mc_se,
                        a.delta_bound
                    )
                    .unwrap(),
                    Format::Table => writeln!(
                        s,
                        "{delta:>7.3} {l:>8.3} {d:>5.2} {exact:>12.6} {classical:>12.6} {:>12.6} {:>10.6} {bound:>12.6}",
                        mc.estimate, mc.mc_se
                    )
                    .unwrap(),
                }
            }
        }
    }
    emit(&a.output, &s)
}

pub fn cmd_choose_d(a: &ChooseDArgs) -> CliResult<()> {
    let ds = load_csv::<f64>(&a.data.data, &a.data.response)?.standardize()?;
    let problem = Problem::new(&ds);
    let n = ds.n() as f64;
    let ols = problem.ols()?.beta;
    let mut rows: Vec<(&str, f64, Option<f64>, bool)> = Vec::new();
    if a.method != DMethod::L1 {
        let en = problem.enet(a.lambda1, a.lambda2)?.beta;
        // closed form works with the unnormalized loss, so penalties scale by n
        let c = choose_d_closed_form(&ols, &en, &ds, n * a.lambda1, n * a.lambda2)?;
        rows.push(("closed-form", c.d, Some(c.discriminant), c.fallback));
    }
    if a.method != DMethod::ClosedForm {
        let lasso = problem.lasso(a.lambda.unwrap_or(a.lambda1))?.beta;
        rows.push(("l1", choose_d_l1(&ols, &lasso)?, None, false));
    }
    let mut s = String::new();
    if a.output.format == Format::Csv {
        s.push_str("method,d,discriminant,fallback\n");
    }
    for (m, d, q, fb) in rows {
        let q = q.map_or("NA".to_string(), |v| v.to_string());
        match a.output.format {
            Format::Csv => writeln!(s, "{m},{d},{q},{fb}").unwrap(),
            Format::Table => {
                let note = if fb { "  (negative discriminant, l1 fallback)" } else { "" };
                writeln!(s, "{m:<12} d = {d:.6}{note}").unwrap()
            }
        }
    }
    emit(&a.output, &s)
}

pub fn dispatch(cli: &Cli) -> CliResult<()> {
    let run = || match &cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Cv(a) => cmd_cv(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Risk(a) => cmd_risk(a),
        Command::ChooseD(a) => cmd_choose_d(a),
    };
    match cli.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| input_error(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
