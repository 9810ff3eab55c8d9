//! Flags for every subcommand. Every field is optional so that a `--config`
//! file can supply it; defaults are applied after merging.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use infoflow_core::flow::Conditioning;
use infoflow_core::significance::PValueMethod;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "infoflow", version, about = "Information flow networks from multivariate time series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a Lorenz or coupled tent map series as CSV.
    Simulate {
        #[command(subcommand)]
        system: SimulateCommand,
    },
    /// Median or equal-frequency symbolization of a real-valued CSV.
    Symbolize(SymbolizeArgs),
    /// Estimated information network (entropy rates, flows, residuals) as JSON.
    Network(NetworkArgs),
    /// Surrogate tests for every directed pair, as a CSV report.
    Infer(InferArgs),
    /// Inference repeated over a list of lags.
    LagSweep(LagSweepArgs),
    /// Topology inference benchmark over canonical coupled tent map cases.
    BenchTable1(BenchArgs),
    /// Exact identity and network checks on random small systems.
    Verify(VerifyArgs),
    /// Directed graphs up to relabeling of nodes.
    Topologies(TopologiesArgs),
}

#[derive(Debug, Subcommand)]
pub enum SimulateCommand {
    Lorenz(LorenzArgs),
    Ctml(CtmlArgs),
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Mte,
    Pte,
}

impl From<Mode> for Conditioning {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Mte => Conditioning::Multivariate,
            Mode::Pte => Conditioning::Pairwise,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Empirical,
    Gamma,
}

impl From<Method> for PValueMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Empirical => PValueMethod::Empirical,
            Method::Gamma => PValueMethod::Gamma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemmas,
    Network,
}

/// Shared by every subcommand.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct Common {
    /// JSON file of flag values; flags given on the command line win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct LorenzArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Resampling interval.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dt: Option<f64>,
    /// Number of samples from t0 (default: as many as fit before t1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub samples: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sigma: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rho: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t0: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t1: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dt_integrate: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct CtmlArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_vars: Option<usize>,
    /// Directed edges as `from>to` pairs, e.g. `0>1,2>1`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub edges: Option<String>,
    /// Topology code (row-major off-diagonal bits, first pair most significant).
    #[arg(long, conflicts_with = "edges")]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub code: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub noise: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub steps: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SymbolizeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub input: Option<PathBuf>,
    /// Alphabet size; 2 is the median split.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bins: Option<usize>,
}

/// Input series and estimator settings.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct Estimation {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub input: Option<PathBuf>,
    /// The input holds integer symbols rather than real values.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false", default)]
    pub symbols: bool,
    /// Alphabet size for real-valued input.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bins: Option<usize>,
    /// Markov order K.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub order: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mode: Option<Mode>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct NetworkArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub estimation: Estimation,
    /// Lag Δ in steps.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lag: Option<usize>,
}

/// Surrogate test settings.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct Testing {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub surrogates: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub method: Option<Method>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct InferArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub estimation: Estimation,
    #[command(flatten)]
    #[serde(flatten)]
    pub testing: Testing,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lag: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct LagSweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub estimation: Estimation,
    #[command(flatten)]
    #[serde(flatten)]
    pub testing: Testing,
    /// Comma-separated lags: steps for `--input`, resampling intervals for a Lorenz run.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lags: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct BenchArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_vars: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub noise: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub steps: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub order: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lag: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub surrogates: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    /// Seeded subset of this many cases.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub case_limit: Option<usize>,
    /// Run every case for N ≥ 4 instead of the default 40-case subset.
    #[arg(long, conflicts_with = "case_limit")]
    #[serde(skip_serializing_if = "is_false", default)]
    pub all_cases: bool,
    /// Per-case CSV (truth and both inferred graphs).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cases_output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub suite: Option<Suite>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trials: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_vars: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t_steps: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct TopologiesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_vars: Option<usize>,
}
