use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "ownconc",
    version,
    about = "Copula-based concentration analysis of ownership networks"
)]
pub struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Suppress notes on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Degree table and histograms from an edge list.
    Degrees(DegreesArgs),
    /// Fit a power-law or exponential law to a histogram or sample.
    Fit(FitArgs),
    /// Joint pmf of two marginals under a copula.
    Joint(JointArgs),
    /// Shannon entropy of a joint pmf.
    Entropy(EntropyArgs),
    /// Euclidean distance between two joint pmfs.
    Distance(DistanceArgs),
    /// Objective over a θ grid, or an entropy surface over (k, θ).
    Scan(ScanArgs),
    /// Optimize θ for one copula family.
    Calibrate(CalibrateArgs),
    /// Distances, entropy extrema and entropy surfaces in one document.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    JointPositive,
    MarginalPositive,
}

#[derive(Debug, Args)]
pub struct EdgeInput {
    /// Tab-separated instead of comma-separated.
    #[arg(long)]
    pub tsv: bool,

    /// Which nodes enter the degree sample.
    #[arg(long, value_enum, default_value = "joint-positive")]
    pub mode: Mode,
}

#[derive(Debug, Args)]
pub struct DegreesArgs {
    /// Edge list, one `owner,owned[,weight]` per line.
    pub edges: PathBuf,

    #[command(flatten)]
    pub input: EdgeInput,

    /// Write `k_in.csv`, `k_out.csv` (j,count) and, in joint mode,
    /// `joint.csv` into this directory.
    #[arg(long)]
    pub hist_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitFamilyArg {
    PowerLaw,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitMethodArg {
    /// Least squares on the pmf.
    Ls,
    /// Least squares on the survival function (power law only).
    LsSurvival,
    /// Maximum likelihood (power law only, needs a sample).
    Mle,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Histogram as `j,value` rows (counts or probabilities).
    #[arg(long, conflicts_with_all = ["sample", "synthetic"])]
    pub hist: Option<PathBuf>,

    /// Positive integers, one per line.
    #[arg(long, conflicts_with = "synthetic")]
    pub sample: Option<PathBuf>,

    /// Marginal spec such as `power-law:2:19`; exact pmf unless `--draws`.
    #[arg(long)]
    pub synthetic: Option<String>,

    /// Number of draws from the synthetic law.
    #[arg(long, requires = "synthetic")]
    pub draws: Option<usize>,

    #[arg(long, default_value_t = 1, requires = "draws")]
    pub seed: u64,

    #[arg(long, value_enum, default_value = "power-law")]
    pub family: FitFamilyArg,

    #[arg(long, value_enum, default_value = "ls")]
    pub method: FitMethodArg,

    /// Support size for sample input; defaults to the sample maximum.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MarginalPair {
    /// In-degree marginal: `power-law:γ:n`, `exponential:b:n` or a pmf file.
    #[arg(long = "in", value_name = "MARGINAL")]
    pub inn: Option<String>,

    /// Out-degree marginal, same forms as `--in`.
    #[arg(long, value_name = "MARGINAL")]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct JointArgs {
    #[command(flatten)]
    pub marginals: MarginalPair,

    /// `product`, `frechet-lower`, `frechet-upper`, `gumbel:θ`, `clayton:θ`, `frank:θ`.
    #[arg(long)]
    pub copula: String,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    /// Joint pmf file (`i,j,mass` CSV or JSON).
    #[arg(long, conflicts_with = "copula")]
    pub joint: Option<PathBuf>,

    #[command(flatten)]
    pub marginals: MarginalPair,

    #[arg(long)]
    pub copula: Option<String>,

    /// Also report `-Σ C ln C` over copula values (diagnostic).
    #[arg(long, requires = "copula")]
    pub copula_values: bool,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    /// Reference joint pmf.
    #[arg(long)]
    pub target: PathBuf,

    /// Joint pmf compared with the target.
    #[arg(long, conflicts_with = "copula")]
    pub joint: Option<PathBuf>,

    #[command(flatten)]
    pub marginals: MarginalPair,

    #[arg(long)]
    pub copula: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Entropy,
    Distance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GoalArg {
    Min,
    Max,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub family: String,

    #[arg(long, value_enum, default_value = "entropy")]
    pub objective: ObjectiveArg,

    /// θ grid `lo:hi:steps`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,

    /// k grid `lo:hi:steps`; marginals written as `power-law:k:n` or
    /// `exponential:k:n` are scanned over it.
    #[arg(long)]
    pub k_grid: Option<String>,

    #[command(flatten)]
    pub marginals: MarginalPair,

    /// Target joint for the distance objective.
    #[arg(long)]
    pub target: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CalibrationFlags {
    /// θ window `lo:hi`; defaults depend on the family.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,

    /// Coarse grid points per θ branch.
    #[arg(long, default_value_t = ownconc::calibrate::DEFAULT_COARSE_POINTS)]
    pub coarse_points: usize,

    /// Golden-section tolerance on θ.
    #[arg(long, default_value_t = ownconc::calibrate::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub family: String,

    #[arg(long, value_enum, default_value = "distance")]
    pub objective: ObjectiveArg,

    /// Defaults to min for distance and max for entropy.
    #[arg(long, value_enum)]
    pub goal: Option<GoalArg>,

    #[command(flatten)]
    pub marginals: MarginalPair,

    #[arg(long)]
    pub target: Option<PathBuf>,

    #[command(flatten)]
    pub calibration: CalibrationFlags,

    /// Write the coarse scan as CSV here.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Edge list; marginals and the observed joint come from it.
    #[arg(long, conflicts_with_all = ["inn", "out", "target"])]
    pub edges: Option<PathBuf>,

    #[command(flatten)]
    pub input: EdgeInput,

    #[command(flatten)]
    pub marginals: MarginalPair,

    /// Observed joint, used with `--in`/`--out`.
    #[arg(long)]
    pub target: Option<PathBuf>,

    #[command(flatten)]
    pub calibration: CalibrationFlags,

    /// k grid of the entropy surfaces.
    #[arg(long)]
    pub k_grid: Option<String>,
}
