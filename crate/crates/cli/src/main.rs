//! `wstark` — scenario runner for wave-packet dynamics in tilted optical
//! lattices: build and cache the Wannier-Stark basis, run the exact
//! propagator or one of the numerical oracles, sweep parameters, and
//! validate the library invariants.

mod commands;
mod config;
mod scenario;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use config::{Model, ScenarioConfig};
use std::path::PathBuf;
use wannier_stark::units::LatticeParams;

#[derive(Parser)]
#[command(name = "wstark", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Scenario config file (flat sectioned key=value text)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config)
    #[arg(long)]
    out: Option<String>,
    /// Named parameter preset: `paper` selects v0 = 4.5, f = 0.5
    #[arg(long)]
    preset: Option<String>,
    /// Seed for the randomized validation checks
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Build (or load from cache) the Wannier-Stark basis and print a report
    Basis {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run a dynamics scenario and emit CSV outputs plus a plot script
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Evolution model (overrides the config)
        #[arg(long)]
        model: Option<String>,
    },
    /// Run the scenario per value of one parameter axis, in parallel
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Parameter to sweep: f | v0 | f0 | omega | k0
        #[arg(long)]
        axis: String,
        /// Comma-separated list of axis values
        #[arg(long)]
        values: String,
    },
    /// Run the full invariant suite at the configured parameters
    Validate {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn resolve(common: &CommonArgs, model: Option<&str>) -> Result<ScenarioConfig> {
    let mut cfg = match &common.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(preset) = &common.preset {
        match preset.as_str() {
            "paper" => {
                cfg.params =
                    LatticeParams::new(4.5, 0.5, cfg.params.f0(), cfg.params.omega())?;
            }
            other => bail!("unknown preset '{other}'"),
        }
    }
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(model) = model {
        cfg.model = Model::parse(model)?;
    }
    Ok(cfg)
}

fn main() {
    let cli = Cli::parse();
    let command_line: String = std::env::args().collect::<Vec<_>>().join(" ");
    let outcome = match &cli.command {
        Command::Basis { common } => {
            resolve(common, None).and_then(|cfg| commands::basis::cmd_basis(&cfg))
        }
        Command::Run { common, model } => resolve(common, model.as_deref())
            .and_then(|cfg| commands::run::cmd_run(&cfg, &command_line))
            .and_then(|outcome| {
                if outcome.violations.is_empty() {
                    Ok(())
                } else {
                    for v in &outcome.violations {
                        eprintln!("validity violation: {v}");
                    }
                    bail!("{} validity diagnostics failed", outcome.violations.len())
                }
            }),
        Command::Sweep { common, axis, values } => resolve(common, None).and_then(|cfg| {
            let axis = commands::sweep::SweepAxis::parse(axis)?;
            let values: Vec<f64> = values
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|e| anyhow::anyhow!("bad value '{v}': {e}")))
                .collect::<Result<_>>()?;
            if values.is_empty() {
                bail!("no sweep values given");
            }
            commands::sweep::cmd_sweep(&cfg, axis, &values)
        }),
        Command::Validate { common } => {
            resolve(common, None).and_then(|cfg| commands::validate::cmd_validate(&cfg))
        }
    };
    if let Err(e) = outcome {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
