//! Command-line driver: configuration parsing, reproduction presets and
//! sweep orchestration on top of `scwd-core`.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::RunConfig;

#[derive(Debug, Parser)]
#[command(
    name = "scwd",
    version,
    about = "Windowed density evolution for spatially coupled LDPC ensembles on the BEC"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the potential function and locate its critical points.
    Landscape(CommonArgs),
    /// Run the windowed decoder and record the wave.
    Wave(CommonArgs),
    /// Measure the propagation speed and its bounds over an (ε, W) grid.
    Speed(CommonArgs),
    /// Print BP and MAP thresholds.
    Thresholds(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML configuration file.
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in configuration.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads (default: available processors).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Table1,
    Fig2,
    Fig3,
    Fig4,
}

impl Preset {
    pub fn text(self) -> &'static str {
        match self {
            Preset::Table1 => include_str!("../presets/table1.toml"),
            Preset::Fig2 => include_str!("../presets/fig2.toml"),
            Preset::Fig3 => include_str!("../presets/fig3.toml"),
            Preset::Fig4 => include_str!("../presets/fig4.toml"),
        }
    }

    pub fn config(self) -> anyhow::Result<RunConfig> {
        RunConfig::from_toml(self.text())
    }
}

/// Exit code for an error: 2 for numerical failures, 1 for everything else
/// (configuration and I/O).
pub fn exit_code(err: &anyhow::Error) -> i32 {
    use scwd_core::Error as E;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::MissingFixedPoint { .. }
                | E::NoConvergence { .. }
                | E::DegenerateDenominator(_)
                | E::MissingCriticalPoint(_)
                | E::MissingWindow(_) => 2,
                _ => 1,
            };
        }
    }
    1
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let (Command::Landscape(args)
    | Command::Wave(args)
    | Command::Speed(args)
    | Command::Thresholds(args)) = &cli.command;
    let cfg = match (&args.config, args.preset) {
        (Some(path), None) => RunConfig::from_path(path)?,
        (None, Some(p)) => p.config()?,
        _ => bail!("pass exactly one of --config or --preset"),
    };
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.workers {
        if n == 0 {
            bail!("--workers must be at least 1");
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().context("cannot start worker pool")?;
    let out = &args.out;
    pool.install(|| match &cli.command {
        Command::Landscape(_) => commands::landscape(&cfg, out),
        Command::Wave(_) => commands::wave(&cfg, out),
        Command::Speed(_) => commands::speed(&cfg, out),
        Command::Thresholds(_) => commands::thresholds(&cfg, out),
    })?;
    Ok(())
}
