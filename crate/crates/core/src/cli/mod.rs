//! Command-line front end.
//!
//! Exit codes: `0` success, `1` runtime or convergence failure, `2` usage
//! error. Every subcommand prints a human table by default; `--json` and
//! `--csv` switch the format.

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::HcError;
use crate::weakperiodic::InvariantSet;

pub use output::{Format, SCHEMA_PATH};

/// Environment variable capping the worker threads used by sweeps and
/// multi-start searches.
pub const THREADS_ENV: &str = "HC_TREE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "hc-tree",
    version,
    about = "Hard-core model on Cayley trees: boundary laws, critical activities, extremality",
    args_override_self = true
)]
pub struct Cli {
    /// key = value file supplying defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// All translation-invariant and two-periodic boundary laws.
    Solve(PointArgs),
    /// Extremality verdict for every two-periodic measure.
    Classify(PointArgs),
    /// Evaluate quantities on a grid of activities and write CSV.
    Sweep(SweepArgs),
    /// Exact consistency check on a finite ball.
    Oracle(OracleArgs),
    /// Critical activities for a tree order.
    Critical(CriticalArgs),
    /// Weakly periodic boundary laws on an invariant set.
    Weak(WeakArgs),
}

#[derive(Debug, Args)]
pub struct FormatArgs {
    /// Emit JSON.
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV.
    #[arg(long)]
    pub csv: bool,
}

impl FormatArgs {
    fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            Format::Table
        }
    }
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// Tree order (children per vertex), at least 2.
    #[arg(short = 'k', long = "order", visible_alias = "k")]
    pub k: u32,
    /// Activity λ > 0.
    #[arg(short = 'l', long = "lambda")]
    pub lambda: f64,
    /// Absolute residual tolerance.
    #[arg(long, default_value_t = crate::numeric::DEFAULT_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub format: FormatArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    /// Number of two-periodic Gibbs measures.
    #[value(name = "solutions")]
    Solutions,
    /// k = 3 discriminant D(λ).
    #[value(name = "D")]
    D,
    /// k = 3 Kesten-Stigum margin h(λ).
    #[value(name = "h")]
    H,
    /// k = 3 MSW margin g(λ).
    #[value(name = "g")]
    G,
    /// Second eigenvalue of the TI and periodic chains.
    #[value(name = "s2")]
    S2,
    /// Kesten-Stigum values.
    #[value(name = "ks")]
    Ks,
    /// MSW values.
    #[value(name = "msw")]
    Msw,
    /// Extremality verdicts.
    #[value(name = "verdict")]
    Verdict,
    /// Number of weakly periodic laws on --set with subset size -i.
    #[value(name = "weakperiodic_count")]
    WeakPeriodicCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(short = 'k', long = "order", visible_alias = "k")]
    pub k: u32,
    /// Quantities to tabulate; repeat the flag or separate with commas.
    #[arg(short = 'q', long, value_enum, value_delimiter = ',', required = true)]
    pub quantity: Vec<Quantity>,
    /// Smallest activity (`-lmin` is accepted too).
    #[arg(long = "lmin", visible_alias = "lambda-min")]
    pub lambda_min: f64,
    /// Largest activity (`-lmax` is accepted too).
    #[arg(long = "lmax", visible_alias = "lambda-max")]
    pub lambda_max: f64,
    /// Grid points, at least 2.
    #[arg(short = 'n', long = "points", default_value_t = 100)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = Scale::Linear)]
    pub scale: Scale,
    /// Subset size for weakperiodic_count.
    #[arg(
        short = 'i',
        long = "subset-size",
        visible_alias = "i",
        default_value_t = 1
    )]
    pub i: u32,
    /// Invariant set for weakperiodic_count.
    #[arg(long, default_value = "I2")]
    pub set: InvariantSet,
    /// Output file; stdout when absent.
    #[arg(short = 'o', long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleMode {
    /// Translation-invariant field on every vertex.
    Ti,
    /// Two-periodic pair alternating by level parity.
    Periodic,
    /// Translation-invariant field shifted by +0.1 (negative control).
    Perturbed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RootArg {
    Half,
    Full,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(short = 'k', long = "order", visible_alias = "k")]
    pub k: u32,
    #[arg(short = 'l', long = "lambda")]
    pub lambda: f64,
    /// Ball depth.
    #[arg(short = 'n', long = "depth")]
    pub depth: u32,
    #[arg(long, value_enum)]
    pub mode: OracleMode,
    /// Root with k children (half) or k + 1 children (full).
    #[arg(long, value_enum, default_value_t = RootArg::Half)]
    pub root: RootArg,
    /// Also sample this many tree-chain configurations.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Sampler seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub format: FormatArgs,
}

#[derive(Debug, Args)]
pub struct CriticalArgs {
    #[arg(short = 'k', long = "order", visible_alias = "k")]
    pub k: u32,
    /// ε in the large-k non-extremality bound.
    #[arg(short = 'e', long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[command(flatten)]
    pub format: FormatArgs,
}

#[derive(Debug, Args)]
pub struct WeakArgs {
    #[arg(short = 'k', long = "order", visible_alias = "k")]
    pub k: u32,
    /// Size of the generator subset, 1 ≤ i ≤ k + 1.
    #[arg(short = 'i', long = "subset-size", visible_alias = "i")]
    pub i: u32,
    #[arg(long)]
    pub set: InvariantSet,
    #[arg(short = 'l', long = "lambda")]
    pub lambda: f64,
    #[arg(long, default_value_t = crate::numeric::DEFAULT_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub format: FormatArgs,
}

/// Failure classes, mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<HcError> for CliError {
    fn from(e: HcError) -> Self {
        match e {
            HcError::Domain(msg) => CliError::Usage(msg),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

/// Parses arguments, runs the command, prints its output and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match config::expand(args.into_iter().map(Into::into).collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command and returns what it prints on stdout.
pub fn execute(command: &Command) -> Result<String, CliError> {
    match command {
        Command::Solve(a) => commands::solve(a),
        Command::Classify(a) => commands::classify(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Critical(a) => commands::critical(a),
        Command::Weak(a) => commands::weak(a),
    }
}
