use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "archetypal",
    version,
    about = "Numerics for the archetypal functional equation y(x) = E{y(alpha(x - beta))}"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a measure and report K = E ln|alpha|, the regime and q = P(alpha < 0).
    Classify {
        #[command(flatten)]
        common: Common,
        /// Band around zero treated as critical for continuous marginals.
        #[arg(long, default_value_t = archetypal_core::measure::DEFAULT_CRITICAL_TOLERANCE)]
        tol: f64,
    },
    /// Empirical canonical solution F(x) = P(Upsilon <= x) on a grid.
    Solve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        series: SeriesArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Emit the CDF even when it does not solve the equation.
        #[arg(long)]
        allow_non_solution: bool,
    },
    /// Iterate the transfer operator T on a grid function.
    Iterate {
        #[command(flatten)]
        common: Common,
        /// Starting function.
        #[arg(long, value_enum, default_value_t = StartFn::Cos)]
        f0: StartFn,
        #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
        xmin: f64,
        #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
        xmax: f64,
        #[arg(long, default_value_t = 2001)]
        m: usize,
        /// Number of iterations.
        #[arg(short = 'n', long = "iterations", default_value_t = 100)]
        iterations: usize,
        /// Fraction of the grid excluded on each side from interior statistics.
        #[arg(long, default_value_t = archetypal_core::operator::DEFAULT_INTERIOR_MARGIN)]
        margin: f64,
        /// Destination of the final grid `x,y` (default: after the history on stdout,
        /// or `<out>.grid.csv` when `--out` is given).
        #[arg(long)]
        grid_out: Option<PathBuf>,
    },
    /// Characteristic function of Upsilon, or of the n-th Fourier iterate.
    Charfn {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        series: SeriesArgs,
        /// Frequencies (comma separated); default is 256 geometric points on [0.01, 100] plus 0.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        s: Option<Vec<f64>>,
        /// Evaluate E{e^{isB_n} z0(s/A_n)} with z0 = 1 at depth n instead of sampling Upsilon.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Simulate one chain trajectory with its coefficient sums.
    Chain {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x0: f64,
        #[arg(short = 'n', long = "steps", default_value_t = 20)]
        steps: usize,
        /// Stream index of the trajectory.
        #[arg(long, default_value_t = 0)]
        path: u64,
    },
    /// Run a named verification suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, env = "ARCHETYPAL_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Measure spec as JSON.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub spec: Option<PathBuf>,
    /// Named preset.
    #[arg(long)]
    pub preset: Option<String>,
    /// Preset scale `a`.
    #[arg(long)]
    pub a: Option<f64>,
    /// Preset constant `alpha`.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Preset alpha atoms as `a:p,a:p,...`.
    #[arg(long, allow_hyphen_values = true)]
    pub alphas: Option<String>,
    /// Preset beta masks as `b:p,b:p,...`.
    #[arg(long, allow_hyphen_values = true)]
    pub masks: Option<String>,
    #[arg(long, env = "ARCHETYPAL_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    /// CSV destination (default stdout); metadata goes to `<out>.meta.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SeriesArgs {
    /// Number of draws of Upsilon.
    #[arg(short = 'N', long = "N", default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tail_tol: f64,
    #[arg(long, default_value_t = 16)]
    pub min_depth: usize,
    #[arg(long, default_value_t = 10_000)]
    pub max_depth: usize,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub xmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub xmax: Option<f64>,
    #[arg(long, default_value_t = 2001)]
    pub m: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StartFn {
    Cos,
    Sin,
    Tanh,
    Step,
}

impl StartFn {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            StartFn::Cos => x.cos(),
            StartFn::Sin => x.sin(),
            StartFn::Tanh => x.tanh(),
            StartFn::Step => {
                if x >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}
