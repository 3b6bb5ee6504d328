//! `paretax` — safety-capability tradeoff analysis from the command line.
//!
//! Problem files are JSON (see the README for the schema); reports are
//! JSON on standard output. Every error family maps to a distinct exit
//! code (`crate::error::exit_code`).

mod commands;
mod error;
mod problem;
mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::FrontierArgs;
use crate::error::{exit_code, CliError};
use crate::problem::Problem;

#[derive(Debug, Parser)]
#[command(
    name = "paretax",
    version,
    about = "Geometry of safety-capability tradeoffs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Problem file (JSON).
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Mirror the report to this path in addition to stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Write a CSV sidecar for curve and series commands.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,

    /// Seed for stochastic commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Joint and per-task tax rates of the safety direction.
    Tax,
    /// Sample the safety-capability Pareto frontier.
    Frontier(FrontierCommand),
    /// The frontier-achieving perturbation for one capability.
    OptimalDelta(OptimalDeltaCommand),
    /// Maximum safety gain under a pinned capability target.
    MaxSafety(MaxSafetyCommand),
    /// Safety-safety frontier under preservation of all capabilities.
    Conflict(ConflictCommand),
    /// Classify each capability's effect on the safety-safety tradeoff.
    Classify,
    /// Map the problem into whitened coordinates of its Fisher budget.
    Whiten,
    /// Monte Carlo tax scaling across dimensions.
    ScalingSim(ScalingSimCommand),
    /// Compare closed forms against the brute-force oracles.
    Audit(AuditCommand),
}

#[derive(Debug, Args)]
struct FrontierCommand {
    /// Angle in radians.
    #[arg(long, conflicts_with = "alpha_from")]
    alpha: Option<f64>,

    /// Use the angle between the safety direction and this capability.
    #[arg(long)]
    alpha_from: Option<String>,

    /// Number of frontier samples.
    #[arg(long, default_value_t = 101)]
    samples: usize,

    /// Cross-check the curve against the enumeration oracle at this grid
    /// resolution.
    #[arg(long, num_args = 0..=1, default_missing_value = "4096")]
    audit: Option<usize>,
}

#[derive(Debug, Args)]
struct OptimalDeltaCommand {
    /// Capability name from the problem file.
    #[arg(long)]
    capability: String,

    /// Capability change target.
    #[arg(long)]
    delta_c: f64,
}

#[derive(Debug, Args)]
struct MaxSafetyCommand {
    /// Capability target as name=coefficient pairs, comma separated;
    /// the target vector is the weighted sum of the named capability
    /// directions. Omitted means zero capability change.
    #[arg(long)]
    target: Option<String>,

    /// Cross-check against the enumeration oracle at this resolution.
    #[arg(long, num_args = 0..=1, default_missing_value = "4096")]
    audit: Option<usize>,
}

#[derive(Debug, Args)]
struct ConflictCommand {
    /// Number of frontier samples.
    #[arg(long, default_value_t = 101)]
    samples: usize,
}

#[derive(Debug, Args)]
struct ScalingSimCommand {
    /// Comma-separated dimensions, e.g. 64,256,1024.
    #[arg(long, value_delimiter = ',', required = true)]
    d: Vec<usize>,

    /// Number of incidental capabilities.
    #[arg(long, default_value_t = 0)]
    m_prime: usize,

    /// Comma-separated intrinsic overlaps, e.g. 0.3,0.4.
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<f64>,

    /// Monte Carlo trials per dimension.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
}

#[derive(Debug, Args)]
struct AuditCommand {
    /// Random instances per battery.
    #[arg(long, default_value_t = 200)]
    trials: usize,

    /// Oracle grid resolution.
    #[arg(long, default_value_t = 4096)]
    resolution: usize,
}

fn load_problem(cli: &Cli) -> Result<Problem, CliError> {
    let path = cli
        .input
        .as_ref()
        .ok_or_else(|| CliError::Schema("this command needs --input <problem.json>".into()))?;
    Problem::load(path)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let output = cli.output.as_deref();
    let csv = cli.csv.as_deref();
    match &cli.command {
        Command::Tax => commands::run_tax(&load_problem(&cli)?, output),
        Command::Frontier(args) => commands::run_frontier(
            &load_problem(&cli)?,
            FrontierArgs {
                alpha: args.alpha,
                alpha_from: args.alpha_from.clone(),
                samples: args.samples,
                audit_resolution: args.audit,
                csv,
                output,
            },
        ),
        Command::OptimalDelta(args) => commands::run_optimal_delta(
            &load_problem(&cli)?,
            &args.capability,
            args.delta_c,
            output,
        ),
        Command::MaxSafety(args) => commands::run_max_safety(
            &load_problem(&cli)?,
            args.target.as_deref(),
            args.audit,
            output,
        ),
        Command::Conflict(args) => {
            commands::run_conflict(&load_problem(&cli)?, args.samples, csv, output)
        }
        Command::Classify => commands::run_classify(&load_problem(&cli)?, output),
        Command::Whiten => commands::run_whiten(&load_problem(&cli)?, output),
        Command::ScalingSim(args) => commands::run_scaling_sim(
            &args.d,
            args.m_prime,
            &args.gamma,
            args.trials,
            cli.seed.unwrap_or(0),
            csv,
            output,
        ),
        Command::Audit(args) => commands::run_audit(args.trials, args.resolution, cli.seed, output),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(exit_code(&err));
    }
}
