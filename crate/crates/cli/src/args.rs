use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "covertq", version, about = "Covert quantum communication toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Capacity report for a channel spec file.
    Capacity(CapacityArgs),
    /// Excitation-channel capacity sweep as CSV.
    Sweep(SweepArgs),
    /// Random covert codebook experiment.
    Simulate(SimulateArgs),
    /// Exact toy run of the entanglement-generation protocol.
    Egdemo(EgdemoArgs),
    /// Checks a channel spec file and its support assumptions.
    Validate(ValidateArgs),
    /// Re-runs the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct Output {
    /// Output file; stdout when absent. A manifest is written to `<out>.manifest.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Show rates in bits instead of nats (display only; files keep nats).
    #[arg(long)]
    pub bits: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ChannelSource {
    /// Channel spec JSON file.
    #[arg(long)]
    pub channel: Option<PathBuf>,
    /// Excitation channel with this excitation probability.
    #[arg(long, conflicts_with = "channel")]
    pub excitation: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct CapacityArgs {
    /// Channel spec JSON file.
    pub spec: PathBuf,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.01)]
    pub from: f64,
    #[arg(long, default_value_t = 0.99)]
    pub to: f64,
    #[arg(long, default_value_t = 99)]
    pub steps: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub channel: ChannelSource,
    #[arg(long)]
    pub n: usize,
    /// Square-root-law constant: `alpha = gamma / sqrt(n)`.
    #[arg(long, conflicts_with = "alpha")]
    pub gamma: Option<f64>,
    /// Bernoulli weight of a codeword bit, set directly.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Number of secret messages.
    #[arg(long, default_value_t = 16)]
    pub m: usize,
    /// Bin size (randomization or key index).
    #[arg(long, default_value_t = 16)]
    pub l: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Codebooks drawn for the resolvability experiment.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub s_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub beta_grid: Option<Vec<f64>>,
    /// Decoder threshold `a`.
    #[arg(long, allow_hyphen_values = true)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub max_dense_dim: Option<usize>,
    /// Covertness-only evaluation beyond the dense budget for commuting outputs.
    #[arg(long)]
    pub commuting_fast_path: bool,
    #[arg(long)]
    pub mc_draws: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetArg {
    OmegaAlpha,
    #[value(name = "self")]
    SelfTarget,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PovmArg {
    /// Square-root measurement, or codeword projectors when Willie's test is trivial.
    Auto,
    Srm,
    Projectors,
}

#[derive(Debug, Args, Serialize)]
pub struct EgdemoArgs {
    #[command(flatten)]
    pub channel: ChannelSource,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Message dimension `T`.
    #[arg(long, default_value_t = 2)]
    pub t: usize,
    #[arg(long, default_value_t = 2)]
    pub l: usize,
    /// Bernoulli weight of sampled codewords and of the decoupling target.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Explicit codewords (m-major, comma separated) instead of a sampled code.
    #[arg(long, value_delimiter = ',')]
    pub words: Option<Vec<String>>,
    #[arg(long, value_enum, default_value_t = TargetArg::OmegaAlpha)]
    pub target: TargetArg,
    #[arg(long, value_enum, default_value_t = PovmArg::Auto)]
    pub povm: PovmArg,
    #[arg(long, allow_hyphen_values = true)]
    pub threshold: Option<f64>,
    /// Keep the code's zero phases instead of aligning them.
    #[arg(long)]
    pub no_align: bool,
    #[arg(long)]
    pub max_dim: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct ValidateArgs {
    pub spec: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Write to this path instead of the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
