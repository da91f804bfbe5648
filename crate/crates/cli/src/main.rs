//! `imkit`: measures, decompositions, conversion rates and real operations
//! for geometric imaginarity, driven by JSON matrix files.

mod commands;
mod files;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use imkit_core::{SolverConfig, Tolerances};

use commands::Context;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Invariant(String),
    Solver(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Solver(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Invariant(m) => write!(f, "invalid input: {m}"),
            CliError::Solver(m) => write!(f, "solver failure: {m}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "imkit", version, about = "Geometric imaginarity toolkit")]
struct Cli {
    /// Validation tolerance for input files (PSD and reconstruction checks use 10x).
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Emit an n-point trade-off curve (default 50 when given without a value).
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "50", require_equals = true)]
    curve: Option<usize>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Relative gap tolerance of the SDP solver.
    #[arg(long, global = true, env = "IMKIT_SOLVER_GAP")]
    solver_gap: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Geometric imaginarity, plus real-entanglement monotones for bipartite states.
    Measure { file: PathBuf },
    /// Conversion rates and feasibility between a source and a target state.
    Convert {
        source: PathBuf,
        target: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        fidelity: Option<f64>,
        #[arg(long)]
        probability: Option<f64>,
    },
    /// Optimal pure-state decompositions.
    Decompose {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = DecompositionArg::ConjugateOrthogonal)]
        kind: DecompositionArg,
    },
    /// Realness and covariance of Kraus sets.
    Kraus {
        file: PathBuf,
        #[arg(long, value_enum)]
        action: ActionArg,
        /// Second Kraus file for `merge`.
        #[arg(long)]
        with: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Exact,
    ProbAtFidelity,
    FidelityAtProb,
    Feasible,
    SdpFidelity,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum DecompositionArg {
    ConjugateOrthogonal,
    EqualImaginarity,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ActionArg {
    CheckReal,
    CheckCovariant,
    Realify,
    Merge,
}

fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(CliError::Usage(format!("{name} must be a positive number, got {x}")))
    }
}

fn run(cli: Cli) -> Result<(report::Report, Format, Option<PathBuf>), CliError> {
    let tol = match cli.tol {
        Some(t) => Tolerances::uniform(positive("--tol", t)?),
        None => Tolerances::DEFAULT,
    };
    let solver = match cli.solver_gap {
        Some(g) => SolverConfig::with_gap(positive("IMKIT_SOLVER_GAP", g)?),
        None => SolverConfig::DEFAULT,
    };
    let ctx = Context { tol, curve: cli.curve, solver };
    let load = |p: &PathBuf| commands::load(p, &ctx.tol);
    let report = match &cli.command {
        Command::Measure { file } => commands::measure(&ctx, load(file)?)?,
        Command::Convert { source, target, mode, fidelity, probability } => {
            commands::convert(&ctx, load(source)?, load(target)?, *mode, *fidelity, *probability)?
        }
        Command::Decompose { file, kind } => commands::decompose(&ctx, load(file)?, *kind)?,
        Command::Kraus { file, action, with } => {
            let other = with.as_ref().map(load).transpose()?;
            commands::kraus(&ctx, load(file)?, *action, other)?
        }
    };
    if let Some(name) = report.first_non_finite() {
        return Err(CliError::Invariant(format!("output `{name}` is not finite")));
    }
    Ok((report, cli.format, cli.output))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((report, format, output)) => {
            let rendered = match format {
                Format::Text => report.to_text(),
                Format::Csv => report.to_csv(),
                Format::Structured => report.to_json() + "\n",
            };
            match output {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, rendered) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{rendered}"),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
