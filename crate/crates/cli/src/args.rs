use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "netcontract",
    version,
    about = "Contracts and coalition-proofness checks on influence networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Print a human-readable table instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// First-best contract, welfare, and (with --c) monopoly prices.
    Solve(SolveArgs),
    /// Structural families the network belongs to.
    Classify(GraphArgs),
    /// Check a contract against coalition misreports.
    Verify(VerifyArgs),
    /// Welfare maximum with equal actions inside classes.
    Constrained(ConstrainedArgs),
    /// Sweep a generated family over an externality grid.
    Search(SearchArgs),
    /// Audit the neighbor-announcement mechanism.
    Mechanism(MechanismArgs),
    /// Run the built-in catalog of example checks.
    Examples,
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
pub struct Source {
    /// Graph JSON file.
    #[arg(long, group = "source")]
    pub graph: Option<PathBuf>,
    /// Named built-in graph (path3, three-roots, nested9, tree7, line5, same-tier5, two-stars, partial7).
    #[arg(long, group = "source")]
    pub catalog: Option<String>,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[command(flatten)]
    pub source: Source,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Stand-alone marginal value.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Externality strength; defaults to alpha-factor / lambda.
    #[arg(long, conflicts_with = "alpha_factor")]
    pub alpha: Option<f64>,
    /// Fraction of the validity bound used when --alpha is omitted.
    #[arg(long)]
    pub alpha_factor: Option<f64>,
    /// Marginal production cost.
    #[arg(long)]
    pub c: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Ic,
    Group,
    GroupTransfers,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub params: ParamArgs,
    /// ic: single misreports; group: every member strictly gains;
    /// group-transfers: the coalition's total gain is positive.
    #[arg(long, value_enum, default_value = "group-transfers")]
    pub mode: ModeArg,
    /// Largest coalition size; defaults to min(n, 6).
    #[arg(long)]
    pub max_size: Option<usize>,
    /// Let any agents collude, not only mutually adjacent ones.
    #[arg(long)]
    pub any_coalition: bool,
    /// Agents whose identity is known (1-indexed, comma separated).
    #[arg(long, value_delimiter = ',')]
    pub known: Vec<usize>,
    /// Contract to check (comma separated); defaults to the first best.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
#[group(id = "pattern", required = true, multiple = false)]
pub struct ConstrainedArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Classes as `1,4,5;2;3`; unlisted agents are singletons.
    #[arg(long, group = "pattern")]
    pub classes: Option<String>,
    /// Pick the class pattern from the network's family.
    #[arg(long, group = "pattern")]
    pub auto_family: bool,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// digraph, undirected, hierarchy, single-root, nested or tree.
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
    /// Externality strengths as fractions of the validity bound.
    #[arg(long, value_delimiter = ',', default_value = "0.4,0.8")]
    pub alpha_factors: Vec<f64>,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "group,group-transfers"
    )]
    pub modes: Vec<ModeArg>,
    #[arg(long, default_value_t = 4)]
    pub max_size: usize,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also search non-adjacent coalitions.
    #[arg(long)]
    pub any_coalition: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    Truthful,
    RoleConsistent,
}

#[derive(Debug, Args)]
pub struct MechanismArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value = "role-consistent")]
    pub strategy: StrategyArg,
    /// Largest coalition size; defaults to min(n, 6).
    #[arg(long)]
    pub max_size: Option<usize>,
    /// Location announcements for the menu game (1-indexed, one per agent).
    #[arg(long, value_delimiter = ',')]
    pub announce: Option<Vec<usize>>,
}
