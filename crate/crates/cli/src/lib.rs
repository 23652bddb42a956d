//! Command-line front end.
//!
//! Every subcommand reads matrices from files, writes its results, then
//! recomputes the reported residuals from the files it wrote and prints a
//! JSON [`RunReport`] on stdout. Exit codes: 2 for unreadable input, 3 for
//! violated preconditions, 4 for numerical breakdown or a failed gain search.

mod bench;
mod commands;
mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use bench::{loglog_slope, BenchRow};
pub use report::{InputDigest, RunReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hollowise::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid arguments: {0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use hollowise::Error as E;
        match self {
            CliError::Core(E::Parse(_) | E::NonFinite { .. }) => 2,
            CliError::Core(E::Breakdown(_) | E::NoStableGain { .. }) => 4,
            CliError::Core(_) | CliError::Usage(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "hollowise", version, about = "Hollow and constant-diagonal transformations, stabilizers and simulators")]
pub struct Cli {
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Orthogonal hollowisation (or constant diagonal) of one matrix.
    Hollowise(HollowiseArgs),
    /// Common orthogonal transformation to a hollow and an almost hollow matrix.
    Pair(PairArgs),
    /// Symplectic orthogonal transformation to constant diagonal.
    Symplectic(SymplecticArgs),
    /// Rotation or noise stabilization with gain search.
    Stabilize(StabilizeArgs),
    /// Euler-Maruyama ensembles or the adaptive servo.
    Simulate(SimulateArgs),
    /// Median timings of the pair or symplectic routine over sizes.
    Bench(BenchArgs),
    /// Write the built-in example matrices.
    Fixture(FixtureArgs),
}

#[derive(Debug, Args)]
pub struct HollowiseArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Transformed matrix; `Q` goes next to it with a `_q` suffix.
    #[arg(long)]
    pub output: PathBuf,
    /// Target the constant diagonal `tr(A)/n` instead of requiring zero trace.
    #[arg(long)]
    pub constant_diagonal: bool,
    /// Relative tolerance; defaults to `1e2 n eps`.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long)]
    pub output_dir: PathBuf,
    /// Subtract `tr/n` from each matrix first instead of requiring zero trace.
    #[arg(long)]
    pub shift_trace: bool,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SymplecticArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StabilizeMode {
    Rotation,
    Noise,
}

#[derive(Debug, Args)]
pub struct StabilizeArgs {
    #[arg(long, value_enum)]
    pub mode: StabilizeMode,
    #[arg(long)]
    pub a: PathBuf,
    /// Second system (noise mode).
    #[arg(long)]
    pub b: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub omega: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub lambda: Option<Vec<f64>>,
    #[arg(long, default_value_t = 16384.0)]
    pub mu_max: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub refine_rel: f64,
    /// Use this direction matrix and only search the gain.
    #[arg(long)]
    pub m_fixed: Option<PathBuf>,
    /// Extra gains at which to tabulate the abscissae.
    #[arg(long, value_delimiter = ',')]
    pub probe_mu: Vec<f64>,
    #[arg(long)]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub a: PathBuf,
    /// Noise direction, or the rotation direction with `--servo`.
    #[arg(long)]
    pub m: PathBuf,
    /// Gain, or the initial gain with `--servo`.
    #[arg(long, default_value_t = 0.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 100)]
    pub paths: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fixed initial state; random unit vectors per path otherwise (all ones for the servo).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x0: Option<Vec<f64>>,
    #[arg(long)]
    pub record_every: Option<usize>,
    /// Trailing fraction of the time grid used for the log-slope fit. The
    /// whole run is the default: the mean square is dominated by rare large
    /// paths, and short tails give a noisy slope.
    #[arg(long, default_value_t = 1.0)]
    pub window: f64,
    #[arg(long)]
    pub servo: bool,
    #[arg(long)]
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchAlgo {
    Pair,
    Symplectic,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
    #[arg(long, value_enum)]
    pub algo: BenchAlgo,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FixtureFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct FixtureArgs {
    #[arg(long)]
    pub output_dir: PathBuf,
    /// Only this fixture; all of them otherwise.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, value_enum, default_value_t = FixtureFormat::Text)]
    pub format: FixtureFormat,
}

pub fn run(cli: &Cli) -> CliResult<RunReport> {
    let start = std::time::Instant::now();
    let mut report = match &cli.command {
        Command::Hollowise(a) => commands::hollowise(a),
        Command::Pair(a) => commands::pair(a),
        Command::Symplectic(a) => commands::symplectic(a),
        Command::Stabilize(a) => commands::stabilize(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Bench(a) => bench::run(a),
        Command::Fixture(a) => commands::fixture(a),
    }?;
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    if let Some(path) = &cli.report {
        report::write_file(path, &report.to_json())?;
    }
    Ok(report)
}
