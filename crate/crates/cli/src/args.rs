use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "dpcolor",
    version,
    about = "Correspondence coloring and independent-set experiments"
)]
pub struct Cli {
    /// Worker threads; 0 uses all available cores. Results do not depend on it.
    #[arg(long, global = true, env = "DPCOLOR_THREADS", default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a graph and write it as JSON.
    Gen(GenArgs),
    /// Count independent sets of a graph by size.
    Count(CountArgs),
    /// Check or certify b-IS-richness.
    #[command(subcommand)]
    Richness(RichnessCommand),
    /// Draw a random ℓ-correspondence assignment for a graph.
    Assign(AssignArgs),
    /// Find an (L,M)-coloring.
    Solve(SolveArgs),
    /// Seeded experiment pipelines writing CSV and JSON.
    #[command(subcommand)]
    Exp(ExpCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    Gnp,
    Bipartite,
    Complete,
    Cycle,
    Path,
    Star,
    Empty,
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value_t = GraphKind::Gnp)]
    pub kind: GraphKind,
    /// Number of vertices (leaves for `star`, left side for `bipartite`).
    #[arg(long)]
    pub n: usize,
    /// Right side size for `bipartite`; defaults to `n`.
    #[arg(long)]
    pub right: Option<usize>,
    /// Edge probability for `gnp` and `bipartite`.
    #[arg(long, default_value_t = 0.5)]
    pub edge_prob: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    /// Graph JSON file.
    pub graph: PathBuf,
    /// Write the profile as JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum RichnessCommand {
    /// Exhaustive check of every neighbourhood of a graph file.
    Check(RichnessCheckArgs),
    /// Evaluate the sufficient conditions for a growth profile.
    Verify(RichnessVerifyArgs),
}

#[derive(Debug, Args)]
pub struct RichnessCheckArgs {
    pub graph: PathBuf,
    /// Richness parameter; defaults to log2(Δ)/6.
    #[arg(long)]
    pub b: Option<f64>,
    /// Δ used for b-largeness; defaults to the maximum degree.
    #[arg(long)]
    pub delta: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    Colorable,
    Clique,
    Randomgraph,
}

#[derive(Debug, Args, Serialize)]
pub struct RichnessVerifyArgs {
    #[arg(long, value_enum)]
    pub profile: ProfileKind,
    /// Parameter r of the colorable and clique profiles.
    #[arg(long, default_value_t = 2)]
    pub r: u32,
    /// Non-edge probability of the random-graph profile.
    #[arg(long, default_value_t = 0.5)]
    pub nonedge_p: f64,
    /// Δ = 2^k.
    #[arg(long, conflicts_with = "delta")]
    pub log2_delta: Option<u32>,
    #[arg(long)]
    pub delta: Option<u64>,
    /// b to test; defaults to the largest certified b.
    #[arg(long)]
    pub b: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AssignArgs {
    pub graph: PathBuf,
    #[arg(long)]
    pub ell: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Backtrack,
    Lll,
    Greedy,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub graph: PathBuf,
    pub assignment: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Backtrack)]
    pub method: Method,
    /// Node budget of the exact solver.
    #[arg(long, default_value_t = dpcolor_core::solver::DEFAULT_NODE_BUDGET)]
    pub budget: u64,
    /// Resample cap of the `lll` method; defaults to 2nΔ³.
    #[arg(long)]
    pub cap: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ExpCommand {
    /// Random-graph pipeline: Δ, s_Δ, b(Δ), richness spot checks and a solve.
    Ren(RenArgs),
    /// Success rate of random correspondence assignments on K_n.
    Lbcom(LbcomArgs),
    /// Concentration of size-t independent-set counts in G(s, 1-p).
    Conc(ConcArgs),
    /// Independence number of sparse G(s, p).
    Alpha(AlphaArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RenArgs {
    #[arg(long, default_value_t = 40)]
    pub n: usize,
    /// Non-edge probability p; the graph is G(n, 1-p).
    #[arg(long, default_value_t = 0.5)]
    pub nonedge_p: f64,
    /// Random vertex subsets to spot-check.
    #[arg(long, default_value_t = 20)]
    pub subsets: usize,
    #[arg(long, default_value_t = 1)]
    pub delta0: u64,
    #[arg(long, default_value_t = dpcolor_core::solver::DEFAULT_NODE_BUDGET)]
    pub budget: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for `ren.csv` and `ren.json`.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LbcomArgs {
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    /// List sizes to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 3, 4, 6, 8, 12, 16])]
    pub ell: Vec<usize>,
    /// Sweep c instead, with ℓ = max(1, ⌈c·n/ln n⌉).
    #[arg(long, value_delimiter = ',')]
    pub c_sweep: Option<Vec<f64>>,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, default_value_t = dpcolor_core::solver::DEFAULT_NODE_BUDGET)]
    pub budget: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConcArgs {
    #[arg(long, default_value_t = 55)]
    pub s: u64,
    #[arg(long, default_value_t = 5)]
    pub t: u64,
    /// Non-edge probability p; graphs are G(s, 1-p).
    #[arg(long, default_value_t = 0.5)]
    pub nonedge_p: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AlphaArgs {
    #[arg(long, default_value_t = 20)]
    pub s: u64,
    /// The n in A(s,n) and in the bound n^{-3s}.
    #[arg(long = "n", default_value_t = 1e4)]
    pub n: f64,
    /// Edge probability; defaults to n^{-13/14}.
    #[arg(long)]
    pub edge_p: Option<f64>,
    #[arg(long, default_value_t = false)]
    pub allow_any_p: bool,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}
