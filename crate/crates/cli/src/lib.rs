//! Command-line front-end for relaylab: rate tables, Monte Carlo runs and
//! sweeps, channel export and the self-check suite.

pub mod config;
pub mod output;
pub mod rates;
pub mod simulate;
pub mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use relaylab_core::zoo::save_channel_file;

use config::{ExperimentConfig, Format};
use simulate::{SimOverrides, Sweep};
use verify::Level;

#[derive(Debug, Parser)]
#[command(
    name = "relaylab",
    version,
    about = "Quantize-forward relay channel laboratory"
)]
pub struct Cli {
    /// Worker threads for searches and trials (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Overrides `output.path`; `-` writes to standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Overrides `output.format`.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rate bounds and compress-forward rates for the configured channel.
    Rates {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte Carlo error statistics, one row per sweep point.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// `field=v1,v2,...` with field one of n, R, R2, B, epsilon, decoder.
        /// Repeat to sweep a grid; the first flag varies slowest.
        #[arg(long, value_parser = parse_sweep)]
        sweep: Vec<Sweep>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Writes the configured channel as a channel file.
    ExportChannel {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Runs the self-check suite; exits nonzero if any check fails.
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        level: Level,
    },
}

fn parse_sweep(s: &str) -> Result<Sweep, String> {
    s.parse().map_err(|e: anyhow::Error| e.to_string())
}

fn destination(cfg: &ExperimentConfig, base: &Path, out: &OutputArgs) -> (Option<PathBuf>, Format) {
    let format = out.format.unwrap_or(cfg.output.format);
    let path = match &out.output {
        Some(p) if p == Path::new("-") => None,
        Some(p) => Some(p.clone()),
        None => cfg.output.path.as_ref().map(|p| base.join(p)),
    };
    (path, format)
}

/// Runs `f` on a pool of `workers` threads, or on the global pool.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .context("building the worker pool")?;
            Ok(pool.install(f))
        }
    }
}

/// Executes one invocation and returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    with_workers(cli.workers, move || dispatch(cli.command))?
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Rates { config, out } => {
            let (cfg, base) = ExperimentConfig::load(&config)?;
            let table = rates::rates_table(&cfg, &base)?;
            let (path, format) = destination(&cfg, &base, &out);
            table.write(format, path.as_deref())?;
        }
        Command::Simulate {
            config,
            seed,
            trials,
            sweep,
            out,
        } => {
            let (cfg, base) = ExperimentConfig::load(&config)?;
            let overrides = SimOverrides {
                seed,
                trials,
                sweeps: sweep,
            };
            let table = simulate::simulate_table(&cfg, &base, &overrides)?;
            let (path, format) = destination(&cfg, &base, &out);
            table.write(format, path.as_deref())?;
        }
        Command::ExportChannel { config, output } => {
            let (cfg, base) = ExperimentConfig::load(&config)?;
            let ch = cfg.channel.load(&base)?;
            save_channel_file(&ch, &output)
                .with_context(|| format!("writing {}", output.display()))?;
        }
        Command::Verify { level } => {
            let mut stdout = std::io::stdout().lock();
            let results = verify::run_checks(level, &verify::library_mi, |r| {
                let _ = writeln!(stdout, "{}", r.line());
            });
            let failed = results.iter().filter(|r| !r.passed).count();
            writeln!(
                stdout,
                "{} of {} checks passed",
                results.len() - failed,
                results.len()
            )?;
            return Ok(if failed == 0 { 0 } else { 1 });
        }
    }
    Ok(0)
}
