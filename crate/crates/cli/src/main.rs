//! `jqnn`: build QNN approximations, run the error-decay experiments, and
//! check stored models.

mod commands;
mod fail;
mod registry;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jqnn_core::Experiment;

use crate::commands::Common;
use crate::fail::CliError;

#[derive(Parser, Debug)]
#[command(name = "jqnn", version, about = "Quantum neural network approximation of periodic functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Error grid, points per axis (default 4096 for d = 1, 256 otherwise).
    #[arg(long)]
    grid: Option<usize>,
    /// Compile tolerance on the amplitude residual.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Seed for randomized probes.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl CommonArgs {
    fn common(&self) -> Common {
        Common { grid: self.grid, tol: self.tol, out: self.out.clone(), seed: self.seed }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single-qubit QNN for a univariate function.
    Approx1d {
        /// Built-in name (abssin, abssin25, zero, cos, prodcos, heat) or a coefficient JSON file.
        #[arg(long)]
        func: String,
        #[arg(long = "K")]
        k: usize,
        #[arg(long = "N")]
        n: usize,
        /// Time for --func heat.
        #[arg(long)]
        t: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Multi-qubit (LCU) QNN for a multivariate function.
    Approxnd {
        #[arg(long)]
        func: String,
        /// Comma-separated, one entry per axis.
        #[arg(long = "K", value_delimiter = ',', required = true)]
        k: Vec<usize>,
        #[arg(long = "N", value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long)]
        t: Option<f64>,
        /// Compare the dense circuit unitary with the fast evaluator at seeded probes.
        #[arg(long)]
        dense_check: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Error-decay sweep over (N, K): fig1, fig2 or heat.
    Experiment {
        name: String,
        /// N range as a..b (inclusive) or a comma list.
        #[arg(long = "N", conflicts_with = "n_max")]
        n: Option<String>,
        #[arg(long = "K", conflicts_with = "k_max")]
        k: Option<String>,
        #[arg(long = "Nmax")]
        n_max: Option<usize>,
        #[arg(long = "Kmax")]
        k_max: Option<usize>,
        /// Time for the heat experiment (default 0.5).
        #[arg(long)]
        t: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Reload a model, recompute its error and compare with the stored report.
    Verify {
        /// model.json, or a directory holding model.json and report.json.
        model: PathBuf,
        /// Defaults to report.json next to the model.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Check against this function instead of the one recorded in the model.
        #[arg(long)]
        func: Option<String>,
        #[arg(long)]
        t: Option<f64>,
    },
}

/// `a..b` (inclusive), `a,b,c`, or a single value.
fn parse_range(flag: &str, s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::config(format!("--{flag} expects a..b, a comma list or a number, got {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(CliError::config(format!("--{flag} range {s:?} is empty")));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|v| v.trim().parse().map_err(|_| bad())).collect()
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("JQNN_THREADS") else { return Ok(()) };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config(format!("JQNN_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(format!("cannot start {n} worker threads: {e}")))
}

fn experiment_ranges(
    exp: Experiment,
    n: Option<String>,
    k: Option<String>,
    n_max: Option<usize>,
    k_max: Option<usize>,
) -> Result<(Vec<usize>, Vec<usize>), CliError> {
    let (default_n, default_k) = exp.default_ranges();
    let ns = match (n, n_max) {
        (Some(s), _) => parse_range("N", &s)?,
        (None, Some(max)) => {
            let lo = default_n[0];
            if max < lo {
                return Err(CliError::config(format!("--Nmax must be at least {lo} for {}", exp.name())));
            }
            (lo..=max).collect()
        }
        (None, None) => default_n,
    };
    let ks = match (k, k_max) {
        (Some(s), _) => parse_range("K", &s)?,
        (None, Some(max)) => (0..=max).collect(),
        (None, None) => default_k,
    };
    Ok((ns, ks))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Approx1d { func, k, n, t, common } => {
            println!("{}", commands::approx1d(&func, t, k, n, &common.common())?);
        }
        Command::Approxnd { func, k, n, t, dense_check, common } => {
            println!("{}", commands::approxnd(&func, t, &k, &n, dense_check, &common.common())?);
        }
        Command::Experiment { name, n, k, n_max, k_max, t, common } => {
            let exp = match (name.as_str(), t) {
                ("heat", Some(t)) if t > 0.0 && t.is_finite() => Experiment::Heat { t },
                ("heat", Some(t)) => return Err(CliError::config(format!("--t must be positive, got {t}"))),
                (_, Some(_)) => return Err(CliError::config("--t only applies to the heat experiment")),
                (name, None) => name.parse().map_err(|e: jqnn_core::Error| CliError::config(e.to_string()))?,
            };
            let (ns, ks) = experiment_ranges(exp, n, k, n_max, k_max)?;
            println!("{}", commands::experiment(exp, ns, ks, &common.common())?);
        }
        Command::Verify { model, report, func, t } => {
            let (outcome, text) = commands::verify(&model, report.as_deref(), func.as_deref(), t)?;
            print!("{text}");
            if !outcome.ok {
                return Err(CliError::verify(format!(
                    "recomputed qnn_sup_error differs from the report by {:e} (limit {:e})",
                    outcome.deviation,
                    commands::VERIFY_TOL
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // usage errors are config errors (exit 1); clap's own code 2 means compile failure here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("jqnn: {e}");
            ExitCode::from(e.code())
        }
    }
}
