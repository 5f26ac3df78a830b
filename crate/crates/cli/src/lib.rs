//! Command-line harness for the approximation and concentration experiments:
//! seeded parallel trials, CSV as the canonical output, JSON manifests for
//! replay, and SVG figures derived from the CSV data.

pub mod csvio;
pub mod manifest;
pub mod params;
pub mod plot;
pub mod runner;
pub mod summary;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

use manifest::ExperimentSpec;
use params::load_config;

#[derive(Parser, Debug)]
#[command(
    name = "basislab",
    version,
    about = "Greedy vs. randomized basis approximation experiments and \
             high-dimensional concentration diagnostics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Flat TOML config file with experiment parameters; unknown keys are
    /// errors.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory (created if missing).
    #[arg(long, default_value = "out", global = true)]
    pub out: PathBuf,

    /// Base seed; trial i uses seed + i.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Number of seeded trials (chains per dimension for `chains`).
    #[arg(long, global = true)]
    pub trials: Option<u64>,

    /// Worker threads (default: one per CPU). Output is identical at any
    /// worker count.
    #[arg(long, default_value_t = 0, global = true)]
    pub workers: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Greedy approximation of the three-bump target: error traces, the
    /// guaranteed bound, box-plot summary.
    Greedy,
    /// Randomized-basis approximation of the same target.
    Random,
    /// Approximation of the constant function by random indicators, with
    /// residual snapshots.
    ConstBlowup,
    /// Quasi-orthogonality bounds and probability products over a
    /// (n, eps, theta) grid.
    Bounds,
    /// Almost-orthogonal chain lengths per dimension with bound overlays.
    Chains,
    /// Histogram of angles between random hypercube vectors.
    Angles,
    /// Re-execute an experiment from its manifest.
    Replay {
        /// Path to a manifest.json produced by a previous run.
        manifest: PathBuf,
    },
}

pub fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    let spec = match &cli.command {
        Command::Greedy => {
            let mut p: params::GreedyParams = load_config(g.config.as_deref())?;
            if let Some(seed) = g.seed {
                p.seed = seed;
            }
            if let Some(trials) = g.trials {
                p.trials = trials;
            }
            ExperimentSpec::Greedy(p)
        }
        Command::Random => {
            let mut p: params::RandomParams = load_config(g.config.as_deref())?;
            if let Some(seed) = g.seed {
                p.seed = seed;
            }
            if let Some(trials) = g.trials {
                p.trials = trials;
            }
            ExperimentSpec::Random(p)
        }
        Command::ConstBlowup => {
            let mut p: params::BlowupParams = load_config(g.config.as_deref())?;
            if let Some(seed) = g.seed {
                p.seed = seed;
            }
            if let Some(trials) = g.trials {
                p.trials = trials;
            }
            ExperimentSpec::ConstBlowup(p)
        }
        Command::Bounds => ExperimentSpec::Bounds(load_config(g.config.as_deref())?),
        Command::Chains => {
            let mut p: params::ChainsParams = load_config(g.config.as_deref())?;
            if let Some(seed) = g.seed {
                p.seed = seed;
            }
            if let Some(trials) = g.trials {
                p.trials = trials;
            }
            ExperimentSpec::Chains(p)
        }
        Command::Angles => {
            let mut p: params::AnglesParams = load_config(g.config.as_deref())?;
            if let Some(seed) = g.seed {
                p.seed = seed;
            }
            ExperimentSpec::Angles(p)
        }
        Command::Replay { manifest } => {
            return runner::replay(manifest, &g.out, g.workers);
        }
    };
    runner::run_spec(&spec, &g.out, g.workers)
}
