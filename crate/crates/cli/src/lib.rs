//! `gvi`: solve, compare and benchmark variational inequality solvers from
//! the command line.
//!
//! Exit codes: 0 on success, 1 when a solver fails, does not converge or a
//! bound is violated, 2 on usage, input or parse errors.

mod commands;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use report::Format;

#[derive(Debug, Parser)]
#[command(
    name = "gvi",
    version,
    about = "Projection and Galerkin solvers for monotone VIs over separable cones"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a problem file with one method.
    Solve(SolveArgs),
    /// Compare actual Galerkin errors with their a-priori bounds.
    Bounds(BoundsArgs),
    /// Write a seeded random problem and basis.
    Gen(GenArgs),
    /// Run the Galerkin iteration and print its optimality certificate.
    Certify(CertifyArgs),
    /// Time the interior-point and Galerkin solvers across problem sizes.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Exact,
    Bertsekas,
    Galerkin,
    Ipm,
}

#[derive(Debug, Args)]
struct CommonSolve {
    /// Tolerance on the step norm between iterates.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Iteration limit (default: derived from the contraction factor).
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    method: MethodArg,
    #[arg(long)]
    problem: PathBuf,
    /// Basis file; the identity basis is used when omitted.
    #[arg(long)]
    basis: Option<PathBuf>,
    /// Step size (default: beta/L^2).
    #[arg(long)]
    alpha: Option<f64>,
    #[command(flatten)]
    common: CommonSolve,
    /// Write `t<TAB>step_norm<TAB>distance_to_final` lines to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the solution vector to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long)]
    basis: PathBuf,
    #[command(flatten)]
    common: CommonSolve,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    beta: f64,
    #[arg(long = "L")]
    lipschitz: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cone spec such as `nn:30,free:10` (default: the nonnegative orthant).
    #[arg(long)]
    cone: Option<String>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    basis_out: PathBuf,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long)]
    basis: PathBuf,
    #[arg(long)]
    alpha: Option<f64>,
    /// Tolerance of the certificate checks.
    #[arg(long, default_value_t = 1e-8)]
    cert_tol: f64,
    #[command(flatten)]
    common: CommonSolve,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Comma-separated problem sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [250usize, 500, 1000])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Frobenius norm of the skew part of `M = I + T`.
    #[arg(long, default_value_t = 0.5)]
    skew: f64,
    /// Worker threads; each owns its instances.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

/// Parses `args` (including the program name) and runs the command, writing
/// results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    2
                }
            };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => commands::solve(a, out),
        Command::Bounds(a) => commands::bounds(a, out),
        Command::Gen(a) => commands::gen(a, out),
        Command::Certify(a) => commands::certify(a, out),
        Command::Bench(a) => commands::bench(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "gvi: {e}");
            e.exit_code()
        }
    }
}

/// Runs with the process's stdout and stderr.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run(args, &mut stdout.lock(), &mut stderr.lock());
    let _ = std::io::stdout().flush();
    code
}
