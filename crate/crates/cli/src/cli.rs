//! Argument definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "mprk",
    version,
    about = "MPRK22(alpha) integration, linear stability and spurious fixed point experiments",
    after_help = "Exit codes: 0 success, 1 runtime or numeric failure, 2 usage or validation failure."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a linear PDS and write the trajectory as CSV
    /// (`step,t,y_1,...,y_N,mass`).
    Integrate(IntegrateArgs),
    /// Distance d(alpha, delta) to the steady state over a delta grid
    /// (`delta,d,class`).
    ScanDelta(ScanDeltaArgs),
    /// Distance d(alpha, delta) over an alpha x delta grid
    /// (`alpha,delta,d,class`).
    ScanAlphaDelta(ScanAlphaDeltaArgs),
    /// Evaluate the stability function R(z), classify a mode, sweep z, or
    /// print the critical argument z*.
    Stability(StabilityArgs),
    /// Observed order of convergence on the two-species test problem
    /// (`dt,error,order`).
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    /// Scheme parameter alpha (dimensionless, nonzero).
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Step size dt (time units).
    #[arg(long, default_value_t = 1.0)]
    pub dt: f64,
    /// Number of steps M.
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    /// Rate a of the system [[-a, b], [a, -b]] (1/time).
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Rate b of the system [[-a, b], [a, -b]] (1/time) [default: same as --a].
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Initial offset: y0 = (0.5 + delta, 0.5 - delta) (dimensionless, in [0, 0.5)) [default: 0].
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Rate matrix file: N lines of N comma-separated entries (1/time).
    #[arg(long, value_name = "PATH")]
    pub matrix: Option<PathBuf>,
    /// Initial state for --matrix, comma separated (positive concentrations).
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        value_name = "LIST"
    )]
    pub y0: Option<Vec<f64>>,
    /// Output CSV file [default: stdout].
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThreadArgs {
    /// Worker threads for the scan; the MPRK_THREADS environment variable
    /// takes precedence [default: available parallelism].
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ScanDeltaArgs {
    /// Scheme parameter alpha (dimensionless, nonzero).
    #[arg(long, allow_negative_numbers = true, default_value_t = -0.5)]
    pub alpha: f64,
    /// Rate a of the test problem [[-a, a], [a, -a]] (1/time).
    #[arg(long, default_value_t = 20.0)]
    pub a: f64,
    /// Step size dt (time units).
    #[arg(long, default_value_t = 1.0)]
    pub dt: f64,
    /// Number of steps M per sample.
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    /// Number of equidistant delta samples in (0, 0.5), at least 2.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Append the final state columns y_1,y_2.
    #[arg(long)]
    pub with_states: bool,
    #[command(flatten)]
    pub threads: ThreadArgs,
    /// Output CSV file [default: stdout].
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanAlphaDeltaArgs {
    /// Lower end of the alpha range (exclusive; dimensionless).
    #[arg(long, allow_negative_numbers = true, default_value_t = -2.0)]
    pub alpha_min: f64,
    /// Upper end of the alpha range (inclusive; dimensionless).
    #[arg(long, allow_negative_numbers = true, default_value_t = 2.0)]
    pub alpha_max: f64,
    /// Number of equidistant alpha samples in (alpha-min, alpha-max].
    #[arg(long, default_value_t = 241)]
    pub alpha_samples: usize,
    /// Number of equidistant delta samples in (0, 0.5), at least 2.
    #[arg(long, default_value_t = 160)]
    pub delta_samples: usize,
    /// Rate a of the test problem [[-a, a], [a, -a]] (1/time).
    #[arg(long, default_value_t = 200.0)]
    pub a: f64,
    /// Step size dt (time units).
    #[arg(long, default_value_t = 1.0)]
    pub dt: f64,
    /// Number of steps M per cell.
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    /// Append the final state columns y_1,y_2.
    #[arg(long)]
    pub with_states: bool,
    #[command(flatten)]
    pub threads: ThreadArgs,
    /// Output CSV file [default: stdout].
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    /// Scheme parameter alpha (dimensionless, nonzero).
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Single query at z = dt * lambda (dimensionless).
    #[arg(long, allow_negative_numbers = true)]
    pub z: Option<f64>,
    /// Step size for a (dt, lambda) query (time units).
    #[arg(long, requires = "lambda")]
    pub dt: Option<f64>,
    /// Eigenvalue for a (dt, lambda) query (1/time, nonpositive).
    #[arg(long, allow_negative_numbers = true, requires = "dt")]
    pub lambda: Option<f64>,
    /// Sweep start (dimensionless).
    #[arg(long, allow_negative_numbers = true, requires = "zmax")]
    pub zmin: Option<f64>,
    /// Sweep end (dimensionless).
    #[arg(long, allow_negative_numbers = true, requires = "zmin")]
    pub zmax: Option<f64>,
    /// Number of sweep points, endpoints included [default: 101].
    #[arg(long)]
    pub n: Option<usize>,
    /// Output CSV file [default: stdout].
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    /// Scheme parameter alpha (dimensionless, nonzero).
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    pub alpha: f64,
    /// Rate a of the test problem [[-a, a], [a, -a]] (1/time).
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Initial offset delta (dimensionless, in [0, 0.5)).
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    /// Strictly decreasing step sizes, comma separated, at least 3 (time units)
    /// [default: 2^-3, ..., 2^-10].
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    pub dt_list: Option<Vec<f64>>,
    /// Final time T at which errors are measured (time units).
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    /// Output CSV file [default: stdout].
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}
