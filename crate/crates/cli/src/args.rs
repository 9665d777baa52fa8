use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cl15_core::analysis::{DEFAULT_CANDIDATE_BUDGET, DEFAULT_NODE_BUDGET};
use cl15_core::game::DEFAULT_MOVE_BUDGET;

/// Formulas use `~` for negation, `&` and `|` for the binary connectives,
/// `!` for branching recurrence and `?` for corecurrence.
#[derive(Debug, Parser)]
#[command(name = "cl15", version, about = "Counterstrategies, unit trees and cirquent proofs")]
pub struct Cli {
    #[command(flatten)]
    pub budgets: Budgets,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Budgets {
    /// Largest run a play may reach.
    #[arg(long, global = true, env = "CL15_MOVE_BUDGET", default_value_t = DEFAULT_MOVE_BUDGET)]
    pub move_budget: usize,
    /// Largest unit tree built.
    #[arg(long, global = true, env = "CL15_NODE_BUDGET", default_value_t = DEFAULT_NODE_BUDGET)]
    pub node_budget: usize,
    /// Total resolutions tried by the resolution search.
    #[arg(
        long,
        global = true,
        env = "CL15_CANDIDATE_BUDGET",
        default_value_t = DEFAULT_CANDIDATE_BUDGET
    )]
    pub candidate_budget: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the formula in normal form.
    Parse(FormulaInput),
    /// Play the counterstrategy against an adversary and write the run.
    Simulate(SimulateArgs),
    /// Answer driving, visibility and domination queries on a unit tree.
    Analyze(AnalyzeArgs),
    /// Report whether the image of a unit tree is binary and tautological.
    Taut(TautArgs),
    /// Build, check and write a proof.
    Prove(ProveArgs),
    /// Verify a proof file.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct FormulaInput {
    /// Formula text, e.g. "?~P | !P".
    pub formula: Option<String>,
    /// Read the formula from a file.
    #[arg(long, value_name = "PATH")]
    pub formula_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AdversaryKind {
    Silent,
    Scripted,
    Copycat,
    Interactive,
}

#[derive(Debug, Args)]
pub struct Play {
    /// Counterstrategy iterations, one permission grant each.
    #[arg(long, default_value_t = 2)]
    pub iterations: usize,
    #[arg(long, value_enum, default_value_t = AdversaryKind::Copycat)]
    pub adversary: AdversaryKind,
    /// Transcript replayed by the scripted adversary.
    #[arg(long, value_name = "PATH", required_if_eq("adversary", "scripted"))]
    pub script: Option<PathBuf>,
    /// Moves the copycat makes per grant; every queued move when absent.
    #[arg(long)]
    pub burst: Option<usize>,
}

/// Where opposite pairs come from: a play, a stored run or a pairing file.
#[derive(Debug, Args)]
pub struct Evidence {
    #[command(flatten)]
    pub play: Play,
    /// Read the run from a transcript instead of playing.
    #[arg(long, value_name = "PATH", conflicts_with = "pairing")]
    pub transcript: Option<PathBuf>,
    /// Take opposite pairs from a file of `PAIR <unit> <unit>` lines.
    #[arg(long, value_name = "PATH")]
    pub pairing: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub input: FormulaInput,
    #[command(flatten)]
    pub play: Play,
    /// Write the transcript here instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: FormulaInput,
    #[arg(long, default_value_t = 1)]
    pub height: usize,
    #[command(flatten)]
    pub evidence: Evidence,
    /// Trim the tree by the `RESOLVE <unit> <bits>` lines of this file.
    #[arg(long, value_name = "PATH")]
    pub resolution: Option<PathBuf>,
    /// One query per line.
    #[arg(long, value_name = "PATH")]
    pub queries: PathBuf,
}

#[derive(Debug, Args)]
pub struct TautArgs {
    #[command(flatten)]
    pub input: FormulaInput,
    #[arg(long, default_value_t = 1)]
    pub height: usize,
    #[command(flatten)]
    pub evidence: Evidence,
    #[arg(long, value_name = "PATH")]
    pub resolution: Option<PathBuf>,
    /// Also prune redundant corecurrence disjuncts and report the result.
    #[arg(long)]
    pub minimize: bool,
    /// Print the hyperformula.
    #[arg(long)]
    pub show: bool,
}

#[derive(Debug, Args)]
pub struct ProveArgs {
    #[command(flatten)]
    pub input: FormulaInput,
    #[arg(long, default_value_t = 1)]
    pub height: usize,
    #[command(flatten)]
    pub evidence: Evidence,
    /// Prune redundant corecurrence disjuncts before deriving.
    #[arg(long)]
    pub minimize: bool,
    /// Write the proof here instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Log every step with its images and labels to standard error.
    #[arg(long)]
    pub trace: bool,
    /// Write a key:value summary of the attempt.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Proof file.
    pub file: PathBuf,
    /// The formula to check against, overriding the file's `PROOF` line.
    #[arg(long)]
    pub formula: Option<String>,
}
