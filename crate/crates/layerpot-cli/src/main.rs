//! `layerpot`: command-line front end for the boundary-integral solver.
//!
//! Exit codes: 0 on success, 1 when a check fails or a computation cannot be
//! completed, 2 when the command line or an input document is invalid.

mod cache;
mod commands;
mod inputs;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "layerpot", version, about = "Layer-potential solver for div A grad u = 0")]
struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the fundamental solution and its gradients at point pairs.
    Green(GreenArgs),
    /// Assemble boundary operators and write them as CSV.
    Assemble(AssembleArgs),
    /// Solve a boundary value problem and evaluate the solution on a grid.
    Solve(SolveArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Sweep a complex perturbation of a real field and record conditioning.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    /// Geometry JSON file or `preset:NAME`.
    #[arg(long, default_value = "preset:unit_disk")]
    pub geometry: String,
    /// Coefficient JSON file or `preset:NAME`.
    #[arg(long, default_value = "preset:identity")]
    pub coefficients: String,
    #[arg(long, default_value_t = 16)]
    pub panels: usize,
    /// Corner grading exponent.
    #[arg(long, default_value_t = 1.0)]
    pub grading: f64,
    /// Gauss-Legendre nodes per panel.
    #[arg(long, default_value_t = 16)]
    pub order: usize,
    /// JSON file overriding the Fourier evaluator parameters.
    #[arg(long)]
    pub fourier: Option<String>,
}

#[derive(Debug, Args)]
pub struct GreenArgs {
    #[arg(long, default_value = "preset:identity")]
    pub coefficients: String,
    /// JSON list of `[[X_x, X_y], [Y_x, Y_y]]` pairs (pole first).
    #[arg(long, conflicts_with = "random")]
    pub pairs: Option<String>,
    /// Number of random pairs drawn from `--box`.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `xmin,xmax,ymin,ymax` for random pairs.
    #[arg(long, value_delimiter = ',', num_args = 4, default_values_t = [-1.0, 1.0, -1.0, 1.0])]
    pub r#box: Vec<f64>,
    /// Evaluate the fundamental solution of the transposed field.
    #[arg(long)]
    pub transposed: bool,
    #[arg(long)]
    pub fourier: Option<String>,
    /// CSV output (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OpName {
    Kplus,
    Kminus,
    KtPlus,
    KtMinus,
    Lt,
    SingleValue,
    SingleFluxPlus,
    SingleFluxMinus,
    SingleTangential,
}

#[derive(Debug, Args)]
pub struct AssembleArgs {
    #[command(flatten)]
    pub mesh: MeshArgs,
    /// Operators to assemble.
    #[arg(long = "op", value_enum, required = true)]
    pub ops: Vec<OpName>,
    /// Directory receiving `mesh.csv`, `<op>.csv` and `<op>.json`.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemArg {
    Dirichlet,
    Neumann,
    Regularity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Dense,
    Gmres,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub problem: ProblemArg,
    /// Integrability exponent of the data space.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[command(flatten)]
    pub mesh: MeshArgs,
    /// CSV of nodal values (`re[,im]` per node) or `preset:NAME`
    /// (cos_theta, sin_theta, linear_x, linear_y, one, zero, conormal_x,
    /// conormal_y, atom:CX,CY,R).
    #[arg(long)]
    pub data: String,
    /// JSON evaluation grid: a list of points or `{"x": [min, max, n], "y": [min, max, n]}`.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, value_enum, default_value = "dense")]
    pub method: MethodArg,
    /// Relative tolerance of the iterative method.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// CSV of interior values (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON solve report.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite JSON file or `preset:NAME`.
    #[arg(long)]
    pub suite: String,
    #[arg(long)]
    pub out_report: Option<PathBuf>,
    #[arg(long)]
    pub out_constants: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sweep JSON file or `preset:NAME`.
    #[arg(long, default_value = "preset:complex_sweep")]
    pub config: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    /// Invalid command line or input document (exit 2).
    Config(String),
    /// A check failed (exit 1).
    Failed(String),
    /// The computation itself failed (exit 1).
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Failed(_) | CliError::Runtime(_) => 1,
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<layerpot::Error> for CliError {
    fn from(e: layerpot::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Failed(m) => write!(f, "check failed: {m}"),
            CliError::Runtime(e) => write!(f, "error: {e:#}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("configuration error: cannot set thread count: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Green(a) => commands::green(a),
        Command::Assemble(a) => commands::assemble(a),
        Command::Solve(a) => commands::solve(a),
        Command::Verify(a) => commands::verify(a),
        Command::Sweep(a) => commands::sweep(a),
    };
    match result {
        Ok(summary) => {
            eprintln!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
