use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use blrs_cli::benchmark::{render_trial, run_trial};
use blrs_cli::fit::{run_fit, Solver};
use blrs_cli::gen::run_gen;
use blrs_cli::input::load_dataset;
use blrs_cli::predict::run_predict;
use blrs_cli::split::SplitSpec;
use blrs_cli::CliError;
use blrs_core::Nu;

/// Bayesian linear regression with Student-t and Gaussian assumptions.
///
/// Hyperparameters are learned by evidence maximization; `nu` selects the
/// distributional assumption (`inf` = Gaussian) and only changes how fast the
/// iteration converges, not where it converges to.
#[derive(Parser)]
#[command(name = "blrs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn (alpha, beta) on a CSV dataset and save the model as JSON
    Fit(FitArgs),
    /// Score new rows with a saved model
    Predict(PredictArgs),
    /// Cross-validated degrees-of-freedom sweep, one table per trial
    Benchmark(BenchmarkArgs),
    /// Generate a synthetic dataset from the generative model
    GenSynthetic(GenArgs),
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV (header row auto-detected)
    #[arg(long)]
    input: PathBuf,
    /// Target column: header name or 0-based index
    #[arg(long)]
    target: String,
    /// Degrees of freedom: a positive number or the literal "inf"
    #[arg(long, default_value = "inf")]
    nu: String,
    #[arg(long, value_enum, default_value_t = Solver::Qem)]
    solver: Solver,
    /// Relative-change stopping tolerance on alpha and beta
    #[arg(long, default_value_t = 1e-7)]
    rel_tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    /// Where to write the fitted model (JSON)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    /// Fitted model (JSON) written by `fit`
    #[arg(long)]
    model: PathBuf,
    /// CSV of feature rows (no target column; header auto-detected)
    #[arg(long)]
    input: PathBuf,
    /// Where to write the single-column prediction CSV
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Input CSV (header row auto-detected)
    #[arg(long)]
    input: PathBuf,
    /// Target column: header name or 0-based index
    #[arg(long)]
    target: String,
    /// Comma-separated degrees-of-freedom values ("inf" allowed)
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "1e-8,1e-5,1e-2,10,1e4,inf"
    )]
    nus: Vec<String>,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Shuffle seed for the fold split (logged in the output)
    #[arg(long)]
    seed: u64,
    /// Run a single trial (1-based); all folds when omitted
    #[arg(long)]
    trial: Option<usize>,
    #[arg(long, default_value_t = 1e-7)]
    rel_tol: f64,
}

#[derive(Args)]
struct GenArgs {
    /// Number of rows m
    #[arg(long)]
    rows: usize,
    /// Number of feature columns M (must be < rows)
    #[arg(long)]
    cols: usize,
    /// Weight precision of the generative model
    #[arg(long, default_value_t = 1.0)]
    alpha_true: f64,
    /// Noise precision of the generative model
    #[arg(long, default_value_t = 100.0)]
    beta_true: f64,
    #[arg(long)]
    seed: u64,
    /// Where to write the CSV
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Fit(args) => {
            let nu: Nu = args.nu.parse()?;
            let summary = run_fit(
                &args.input,
                &args.target,
                nu,
                args.solver,
                args.rel_tol,
                args.max_iter,
                &args.out,
            )?;
            println!("{}", summary.line());
            if !summary.model.converged {
                return Err(CliError::NonConvergence {
                    max_iter: args.max_iter,
                });
            }
            Ok(())
        }
        Command::Predict(args) => {
            let n = run_predict(&args.model, &args.input, &args.out)?;
            eprintln!("wrote {n} predictions to {}", args.out.display());
            Ok(())
        }
        Command::Benchmark(args) => {
            let nus = args
                .nus
                .iter()
                .map(|s| s.parse::<Nu>())
                .collect::<blrs_core::Result<Vec<Nu>>>()?;
            let data = load_dataset(&args.input, &args.target)?;
            let trials: Vec<usize> = match args.trial {
                Some(t) => vec![t],
                None => (1..=args.folds).collect(),
            };
            println!(
                "benchmark: folds={} seed={} rel_tol={:e}",
                args.folds, args.seed, args.rel_tol
            );
            for trial in trials {
                let spec = SplitSpec {
                    folds: args.folds,
                    seed: args.seed,
                    trial,
                };
                let start = std::time::Instant::now();
                let report = run_trial(&data, spec, &nus, args.rel_tol)?;
                print!("{}", render_trial(&report));
                eprintln!(
                    "trial {trial} finished in {:.1} ms",
                    start.elapsed().as_secs_f64() * 1e3
                );
            }
            Ok(())
        }
        Command::GenSynthetic(args) => {
            run_gen(
                args.rows,
                args.cols,
                args.alpha_true,
                args.beta_true,
                args.seed,
                &args.out,
            )?;
            eprintln!(
                "wrote {}x{} dataset to {}",
                args.rows,
                args.cols,
                args.out.display()
            );
            Ok(())
        }
    }
}
