//! The `twodoor` command line.

mod commands;
mod config;
mod output;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

pub use config::Config;
pub use output::{emit, sig6, Field, Format, Report};

#[derive(Debug, Parser)]
#[command(name = "twodoor", version, about = "Back-door, front-door and two-door effect estimation and efficiency bounds")]
pub struct Cli {
    /// Master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (written atomically); stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Full replicate count and sample-size ladder for `simulate`.
    #[arg(long = "paper-scale", global = true)]
    pub full_scale: bool,
    /// Flat key = value file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Efficiency bounds on a joint distribution file or the simulation design.
    Bounds(BoundsArgs),
    /// Fit nuisances on a dataset and estimate the effect.
    Estimate(EstimateArgs),
    /// Monte Carlo study on the simulation design.
    Simulate(SimulateArgs),
    /// Bound-ordering conditions and the binary-example grid scan.
    Compare(CompareArgs),
    /// Bound formulas against brute-force influence-function variances.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Args, Default)]
pub struct PairArgs {
    #[arg(long)]
    pub a_star: Option<f64>,
    #[arg(long)]
    pub a_ref: Option<f64>,
}

#[derive(Debug, Clone, Args, Default)]
pub struct BoundsArgs {
    /// Joint distribution file with header c,a,z,y,p.
    #[arg(long)]
    pub dist: Option<PathBuf>,
    /// Design parameters, e.g. `β=0.5,γ1=0.5,γ2=0.5,α=1`.
    #[arg(long)]
    pub dgp: Option<String>,
    /// Comma-separated model tags (default: all six).
    #[arg(long)]
    pub tags: Option<String>,
    /// Gauss-Hermite order for quadrature bounds.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[command(flatten)]
    pub pair: PairArgs,
}

#[derive(Debug, Clone, Args, Default)]
pub struct EstimateArgs {
    /// Dataset file with header c,a,z,y.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Nuisance spec such as `pZ_given_A=gaussian[A] omit A`; repeatable.
    #[arg(long = "model")]
    pub models: Vec<String>,
    /// Use the specs of a simulation misspecification setting (0-4).
    #[arg(long)]
    pub setting: Option<u8>,
    #[arg(long)]
    pub tags: Option<String>,
    /// Cross-fitting folds (0 disables).
    #[arg(long)]
    pub folds: Option<usize>,
    #[command(flatten)]
    pub pair: PairArgs,
}

#[derive(Debug, Clone, Args, Default)]
pub struct SimulateArgs {
    #[arg(long)]
    pub dgp: Option<String>,
    /// Comma-separated sample sizes.
    #[arg(long)]
    pub sizes: Option<String>,
    /// Replicates per sample size.
    #[arg(long)]
    pub k: Option<usize>,
    /// Misspecification setting (0-4).
    #[arg(long)]
    pub setting: Option<u8>,
    #[arg(long)]
    pub tags: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CompareWhat {
    Interval,
    Diff,
    Prop2,
    Prop6,
    Scan,
}

impl std::str::FromStr for CompareWhat {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Self as clap::ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Args, Default)]
pub struct CompareArgs {
    #[arg(long, value_enum)]
    pub what: Option<CompareWhat>,
    #[arg(long)]
    pub dist: Option<PathBuf>,
    /// `p(a*|c)` for the interval; a 0.01..0.99 grid when absent.
    #[arg(long)]
    pub p_star: Option<f64>,
    /// `γ0,γ1,γ2` of the linear outcome mean for prop6.
    #[arg(long)]
    pub gamma: Option<String>,
    #[command(flatten)]
    pub pair: PairArgs,
}

#[derive(Debug, Clone, Args, Default)]
pub struct OracleArgs {
    #[arg(long)]
    pub dist: Option<PathBuf>,
    #[command(flatten)]
    pub pair: PairArgs,
}

/// Resolved global options.
#[derive(Debug, Clone)]
pub struct Globals {
    pub seed: u64,
    pub format: Format,
    pub full_scale: bool,
    pub config: Config,
}

/// Outcome of a command: the report and whether every internal check passed.
pub struct Outcome {
    pub report: Report,
    pub ok: bool,
}

/// Runs a parsed command line; returns the process exit status.
pub fn run(cli: Cli) -> Result<u8> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let g = Globals {
        seed: config.pick(cli.seed, "seed")?.unwrap_or(1),
        format: match config.raw("format") {
            _ if cli.format.is_some() => cli.format.unwrap_or_default(),
            Some("json") => Format::Json,
            Some("csv") | None => Format::Csv,
            Some(other) => anyhow::bail!("unknown format `{other}` (csv or json)"),
        },
        full_scale: config.flag(cli.full_scale, "paper-scale")?,
        config: config.clone(),
    };
    let out: Option<PathBuf> = config.pick(cli.out.clone(), "out")?;
    let threads: Option<usize> = config.pick(cli.threads, "threads")?;
    let exec = || commands::dispatch(&cli.command, &g);
    let outcome = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new().num_threads(t).build()?.install(exec),
        None => exec(),
    }?;
    emit(&outcome.report.render(g.format)?, out.as_deref())?;
    Ok(if outcome.ok { 0 } else { 2 })
}
