use std::path::PathBuf;
use std::str::FromStr;

use backflow_core::{FigureId, ScanConfig, SolverConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug, Serialize)]
#[command(name = "backflow", version, about = "Maximal quantum backflow on a ring")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Output file (a directory for `reproduce`); standard output if omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed for every random draw, including Lanczos start vectors.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Kernel matrix utilities.
    Kernel {
        #[command(subcommand)]
        action: KernelAction,
    },
    /// Single-particle bound λ_ring.
    Single(BoundArgs),
    /// Two-boson bound Q_B.
    Boson(BoundArgs),
    /// Two-fermion bound Q_F.
    Fermion(FermionArgs),
    /// Current and density of a two-particle state on a (θ, t) grid.
    Observables(ObservablesArgs),
    /// Data behind a figure panel.
    Figures(FiguresArgs),
    /// Run the invariant and property suite.
    Verify(VerifyArgs),
    /// One-shot pipeline: c_ring, Q_B, Q_F, α_* and all figure data.
    Reproduce(ReproduceArgs),
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelAction {
    /// Every entry K_mn as `m,n,value`.
    Dump {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SolverArgs {
    /// Eigen-residual target relative to the Frobenius norm.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Largest dimension solved by dense tridiagonalization.
    #[arg(long, default_value_t = 512)]
    pub dense_limit: usize,
    /// Lanczos basis size before a restart.
    #[arg(long, default_value_t = 400)]
    pub max_basis: usize,
}

impl SolverArgs {
    pub fn config(&self, seed: u64) -> SolverConfig {
        SolverConfig {
            tol: self.tol,
            dense_limit: self.dense_limit,
            max_basis: self.max_basis,
            seed,
            ..SolverConfig::default()
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ScanArgs {
    /// Lower end of the α interval.
    #[arg(long)]
    pub lo: Option<f64>,
    /// Upper end of the α interval.
    #[arg(long)]
    pub hi: Option<f64>,
    /// Coarse α grid step.
    #[arg(long, default_value_t = 0.005)]
    pub step: f64,
    /// Final golden-section bracket width.
    #[arg(long, default_value_t = 1e-6)]
    pub refine_tol: f64,
}

impl ScanArgs {
    pub fn config(&self, defaults: ScanConfig) -> ScanConfig {
        ScanConfig {
            lo: self.lo.unwrap_or(defaults.lo),
            hi: self.hi.unwrap_or(defaults.hi),
            coarse_step: self.step,
            refine_tol: self.refine_tol,
        }
    }
}

#[derive(Args, Debug, Serialize)]
#[group(id = "mode", required = true, multiple = false, args = ["alpha", "scan"])]
pub struct BoundArgs {
    /// Truncation N (modes 0..=N).
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Minimize over α instead of evaluating at one point.
    #[arg(long)]
    pub scan: bool,
    /// Include the minimizing state in the output.
    #[arg(long)]
    pub dump_state: bool,
    #[command(flatten)]
    pub scan_args: ScanArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug, Serialize)]
#[group(id = "mode", required = true, multiple = false, args = ["alpha", "scan", "n_range"])]
pub struct FermionArgs {
    #[arg(long, required_unless_present = "n_range", conflicts_with = "n_range")]
    pub n: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub scan: bool,
    /// Scan every N in `A:B` (inclusive).
    #[arg(long, value_name = "A:B")]
    pub n_range: Option<NRange>,
    /// Append quadratic 1/N fits to an `--n-range` sweep.
    #[arg(long, requires = "n_range", conflicts_with_all = ["alpha", "scan"])]
    pub extrapolate: bool,
    #[arg(long)]
    pub dump_state: bool,
    #[command(flatten)]
    pub scan_args: ScanArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NRange {
    pub lo: usize,
    pub hi: usize,
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("expected A:B, got `{s}`"))?;
        let lo: usize = a.trim().parse().map_err(|e| format!("bad lower bound `{a}`: {e}"))?;
        let hi: usize = b.trim().parse().map_err(|e| format!("bad upper bound `{b}`: {e}"))?;
        if lo > hi {
            return Err(format!("empty range {lo}:{hi}"));
        }
        Ok(NRange { lo, hi })
    }
}

#[derive(Args, Debug, Serialize)]
pub struct ObservablesArgs {
    /// JSON file `{"n_max": N, "sigma": 1 | -1, "coefficients": [c_00, c_01, …]}` (row-major).
    #[arg(long)]
    pub state: PathBuf,
    /// Uniform θ points on [0, 2π).
    #[arg(long, default_value_t = 64)]
    pub theta_points: usize,
    #[arg(long, default_value_t = 0.0)]
    pub t_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_max: f64,
    /// Uniform t points on [t_min, t_max].
    #[arg(long, default_value_t = 11)]
    pub t_points: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct FiguresArgs {
    #[arg(value_parser = parse_figure)]
    pub id: FigureId,
    /// N range of the extrapolation panels.
    #[arg(long, default_value = "20:70")]
    pub n_range: NRange,
    /// Samples of the fitted curve on [0, 1/N_lo].
    #[arg(long, default_value_t = 101)]
    pub fit_samples: usize,
    #[command(flatten)]
    pub scan_args: ScanArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
}

fn parse_figure(s: &str) -> Result<FigureId, String> {
    s.parse::<FigureId>().map_err(|e| e.to_string())
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// Complex trials per symmetry sector in the real-coefficient check.
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    /// Random states per quadrature oracle.
    #[arg(long, default_value_t = 50)]
    pub random_states: usize,
    /// Gauss–Legendre nodes per panel.
    #[arg(long, default_value_t = 256)]
    pub quad_points: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct ReproduceArgs {
    /// Desk-scale run: N ≤ 30 throughout.
    #[arg(long)]
    pub quick: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
}
