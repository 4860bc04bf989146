use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "featattr",
    version,
    about = "Feature relevancy, formal explanations and Shapley attributions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model file (and optionally an instance, threshold and sample).
    Validate(ValidateArgs),
    /// Features that occur in some abductive explanation.
    Relevancy(ProblemArgs),
    /// Extract one subset-minimal abductive explanation.
    Axp(ExtractArgs),
    /// Extract one subset-minimal contrastive explanation.
    Cxp(ExtractArgs),
    /// List every abductive or contrastive explanation.
    Enumerate(EnumerateArgs),
    /// Shapley scores of the expected-value or the WAXp game.
    Shap(ShapArgs),
    /// Rankings of several score vectors and their rank-biased overlap.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GameArg {
    Expected,
    Waxp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Cgt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Axp,
    Cxp,
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON model file.
    #[arg(long, value_name = "PATH")]
    pub model: PathBuf,
    /// Similarity threshold δ, as `p/q` or a decimal. Required for regression models.
    #[arg(long, value_name = "Q", allow_hyphen_values = true)]
    pub delta: Option<String>,
    /// Quantify over a sample instead of the whole feature space.
    #[arg(long, requires = "sample")]
    pub agnostic: bool,
    /// Sample file (header row, comma- or tab-separated) for --agnostic.
    #[arg(long, value_name = "PATH", requires = "agnostic")]
    pub sample: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub output: OutputFormat,
    /// Report wall-clock time (makes output non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Instance to check against the feature domains, e.g. `1,1,2`.
    #[arg(long, value_name = "CSV", allow_hyphen_values = true)]
    pub instance: Option<String>,
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Instance to explain, e.g. `1,1,2`.
    #[arg(long, value_name = "CSV", allow_hyphen_values = true)]
    pub instance: String,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Start from this feature set (comma-separated ids) instead of all features.
    #[arg(long, value_name = "IDS")]
    pub from: Option<String>,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum)]
    pub kind: KindArg,
}

#[derive(Debug, Args)]
pub struct SamplingArgs {
    /// Additive error bound ε of the sampled estimate.
    #[arg(long, value_name = "Q", default_value = "1/20")]
    pub epsilon: String,
    /// Failure probability α of the sampled estimate.
    #[arg(long, value_name = "Q", default_value = "1/20")]
    pub alpha: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Override the number of sampled permutations.
    #[arg(long)]
    pub samples: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ShapArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum, default_value_t = GameArg::Waxp)]
    pub game: GameArg,
    #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
    pub method: MethodArg,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Instance to explain; repeat for a batch summary.
    #[arg(long, value_name = "CSV", required = true, allow_hyphen_values = true)]
    pub instance: Vec<String>,
    /// Score methods as `game/method`, comma-separated.
    #[arg(long, value_name = "LIST", default_value = "waxp/exact,expected/exact")]
    pub methods: String,
    /// RBO persistence p in (0, 1).
    #[arg(long, value_name = "Q", default_value = "1/2")]
    pub persistence: String,
    /// RBO evaluation depth k (clamped to the number of features).
    #[arg(long, default_value_t = 5)]
    pub depth: usize,
    /// Show rankings by absolute score in the table (JSON always has both).
    #[arg(long)]
    pub abs: bool,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}
