//! `eurbound`: figure tables, relation audits, phase optimization and bounds for a state file.

mod commands;
mod state_file;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "eurbound", version, about = "Entanglement bounds from entropic uncertainty relations")]
pub struct Cli {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, env = "EURBOUND_THREADS", global = true)]
    pub threads: Option<usize>,
    /// CSV destination; standard output when absent.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for every random choice made by the command.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ground-state entanglement of the two-particle lattice against log2 L.
    Fig1(Fig1Args),
    /// Normalized state-independent factor over the tunneling-time grid.
    Fig2(Fig2Args),
    /// Histogram of the overlap elements at one tunneling time.
    Fig3(Fig3Args),
    /// Tunneling-time sweep, fully state-dependent bound.
    Fig4(SweepArgs),
    /// Tunneling-time sweep, state-independent bound (same table as fig4).
    Fig5(SweepArgs),
    /// Squeezing sweep measured with optimized phases.
    Fig6(SqueezeArgs),
    /// Squeezing sweep measured in the bare basis.
    Fig7(SqueezeArgs),
    /// Ground-state sweep over q / q_c.
    Fig8(GroundArgs),
    /// Randomized audit of one relation or all of them.
    Audit(AuditArgs),
    /// Optimize the measurement phases for a squeezed state.
    Optimize(OptimizeArgs),
    /// Bounds for a state read from a file.
    Bound(BoundArgs),
}

#[derive(Debug, Args)]
pub struct Fig1Args {
    #[arg(long, default_value_t = 2)]
    pub lmin: usize,
    #[arg(long, default_value_t = 30)]
    pub lmax: usize,
    /// Interaction strength in units of J.
    #[arg(long, default_value_t = -100.0, allow_hyphen_values = true)]
    pub u: f64,
    #[arg(long, default_value_t = 1.0)]
    pub j: f64,
}

#[derive(Debug, Args)]
pub struct Fig2Args {
    #[arg(long, value_delimiter = ',', default_value = "2,3,5,10,20,30")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 60)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct Fig3Args {
    #[arg(long, default_value_t = 30)]
    pub l: usize,
    /// Tunneling time; defaults to the time maximizing the state-independent factor.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub bins: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_value = "2,3,5,10,20,30")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 60)]
    pub points: usize,
    #[arg(long, default_value_t = -100.0, allow_hyphen_values = true)]
    pub u: f64,
    #[arg(long, default_value_t = 1.0)]
    pub j: f64,
}

#[derive(Debug, Args)]
pub struct SqueezeArgs {
    #[arg(long, value_delimiter = ',', default_value = "15,50")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 40)]
    pub points: usize,
    #[arg(long, default_value_t = 2.5)]
    pub rmax: f64,
    /// Particle number at which the phases are optimized (fig6).
    #[arg(long, default_value_t = 15)]
    pub opt_n: usize,
    /// Squeezing parameter at which the phases are optimized (fig6).
    #[arg(long, default_value_t = 0.5)]
    pub opt_r: f64,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    /// Fixed phases `a,b,c` in radians instead of optimizing (fig6).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub phases: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct GroundArgs {
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    /// Spin-mixing coupling; must be negative.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub g: f64,
    #[arg(long, default_value_t = 41)]
    pub points: usize,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub qmin: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub qmax: f64,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    /// Relation name, or `all`.
    #[arg(long, default_value = "all")]
    pub relation: String,
    /// Local dimensions as `d_Axd_B`.
    #[arg(long, default_value = "2x2")]
    pub dims: String,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Objective {
    Fsd,
    EntropySum,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long, default_value_t = 15)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long, value_enum, default_value_t = Objective::Fsd)]
    pub objective: Objective,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// State file.
    pub state: PathBuf,
    /// First basis on A: computational, fourier or hadamard.
    #[arg(long, default_value = "computational")]
    pub x: String,
    /// Second basis on A.
    #[arg(long, default_value = "fourier")]
    pub z: String,
    /// First basis on B; defaults to the complex conjugate of the A basis.
    #[arg(long)]
    pub xb: Option<String>,
    /// Second basis on B; defaults to the complex conjugate of the A basis.
    #[arg(long)]
    pub zb: Option<String>,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<eurbound::Error> for CliError {
    fn from(e: eurbound::Error) -> Self {
        use eurbound::Error as E;
        match e {
            E::InvalidParameter(_) | E::InvalidState(_) | E::InvalidMeasurement(_) | E::Dimension(_) | E::Subsystem { .. } => {
                CliError::Config(e.to_string())
            }
            E::SpectralDomain(_) | E::InvalidDistribution(_) | E::Numerical(_) => CliError::Numerical(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("eurbound: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
