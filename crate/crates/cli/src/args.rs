use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "cylsep", version, about = "Cylinder-separation profiles, exact overlaps and stage certificates")]
pub struct Cli {
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Node budget of each search.
    #[arg(long, global = true, env = "CYLSEP_BUDGET")]
    pub budget: Option<u64>,

    /// JSON run configuration; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Profile Delta_1..Delta_N of a family point or an explicit IFS.
    Delta(DeltaArgs),
    /// Least exact-overlap level up to a cap.
    Overlap(OverlapArgs),
    /// Parameters with an exact overlap at level n.
    EnumH(EnumArgs),
    /// Similarity dimension and dimension bounds of a measure.
    Dims(DimsArgs),
    /// Build a stage certificate.
    Construct(ConstructArgs),
    /// Verify a stage certificate.
    Verify(VerifyArgs),
    /// Compare the branch-and-bound search with brute force.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    U,
    V,
    Joint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MergeArg {
    Union,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

/// A family point, or an explicit IFS file.
#[derive(Args, Debug, Clone, Default)]
pub struct Target {
    /// `example1`, `example2`, or a JSON family file.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, value_enum)]
    pub merge: Option<MergeArg>,
    /// U-side coordinates: rationals separated by commas, or one JSON scalar per flag.
    #[arg(long, allow_hyphen_values = true)]
    pub u: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub v: Vec<String>,
    /// Which system to instantiate; inferred from the given points by default.
    #[arg(long, value_enum)]
    pub side: Option<SideArg>,
    /// Explicit IFS in JSON, instead of a family point.
    #[arg(long, conflicts_with = "family")]
    pub ifs: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DeltaArgs {
    #[command(flatten)]
    pub target: Target,
    #[arg(long)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Emit `n, log2 lower, log2 upper` for plotting instead of the profile.
    #[arg(long)]
    pub plot_data: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OverlapArgs {
    #[command(flatten)]
    pub target: Target,
    #[arg(long)]
    pub n_max: usize,
}

#[derive(Args, Debug)]
pub struct EnumArgs {
    #[command(flatten)]
    pub target: Target,
    #[arg(long)]
    pub n: usize,
    /// Open window `lo,hi` (default: the family's canonical window).
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
}

#[derive(Args, Debug)]
pub struct DimsArgs {
    #[command(flatten)]
    pub target: Target,
    /// Width of the returned enclosures.
    #[arg(long, default_value = "1/1000000000")]
    pub tol: String,
    /// Probability weights, one per map, for the measure bounds.
    #[arg(long)]
    pub weights: Option<String>,
    #[arg(long, default_value = "2")]
    pub q: String,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub target: Target,
    /// `2^-n^2`, `c*r^(e)` with `e` a polynomial in `n`, or a list `1/2,1/4,..`.
    #[arg(long)]
    pub omega: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub stages: usize,
    #[arg(long)]
    pub level_cap: Option<usize>,
    /// On failure, still write the stages completed so far.
    #[arg(long)]
    pub partial: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub certificate: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Also recompute Delta_n in full up to this level.
    #[arg(long)]
    pub full_delta_upto: Option<usize>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(flatten)]
    pub target: Target,
    #[arg(long)]
    pub n_max: usize,
    /// Largest number of word pairs the brute force may visit.
    #[arg(long)]
    pub cap: Option<u128>,
}
