//! `simulate`: Monte Carlo error statistics, optionally over a parameter sweep.

use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use relaylab_core::{cf_rate, run_monte_carlo, CfMode, CodingDistribution, Error as CoreError};

use crate::config::{DistributionSource, ExperimentConfig, SimSection};
use crate::output::{col, Cell, Column, Table, BITS, COUNT, PROB};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepField {
    N,
    Rate,
    R2,
    Blocks,
    Epsilon,
    Decoder,
}

impl FromStr for SweepField {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "n" => Self::N,
            "R" | "rate" => Self::Rate,
            "R2" | "r2" => Self::R2,
            "B" | "blocks" => Self::Blocks,
            "epsilon" => Self::Epsilon,
            "decoder" => Self::Decoder,
            _ => bail!("unknown sweep field `{s}` (expected n, R, R2, B, epsilon or decoder)"),
        })
    }
}

/// One `--sweep field=v1,v2,...` flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sweep {
    pub field: SweepField,
    pub values: Vec<String>,
}

impl FromStr for Sweep {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (field, values) = s
            .split_once('=')
            .with_context(|| format!("sweep `{s}` is not of the form field=v1,v2"))?;
        let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).collect();
        if values.iter().any(String::is_empty) {
            bail!("sweep `{s}` has an empty value");
        }
        Ok(Self {
            field: field.trim().parse()?,
            values,
        })
    }
}

impl Sweep {
    fn apply(&self, sim: &mut SimSection, value: &str) -> Result<()> {
        let num = || {
            value
                .parse::<f64>()
                .with_context(|| format!("sweep value `{value}` is not a number"))
        };
        let int = || {
            value
                .parse::<usize>()
                .with_context(|| format!("sweep value `{value}` is not an integer"))
        };
        match self.field {
            SweepField::N => sim.n = int()?,
            SweepField::Rate => sim.rate = num()?,
            SweepField::R2 => sim.r2 = num()?,
            SweepField::Blocks => sim.blocks = int()?,
            SweepField::Epsilon => sim.epsilon = num()?,
            SweepField::Decoder => sim.decoder = value.parse().map_err(|e| anyhow!("{e}"))?,
        }
        Ok(())
    }
}

/// Command-line overrides applied on top of the config's `sim` section.
#[derive(Debug, Clone, Default)]
pub struct SimOverrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub sweeps: Vec<Sweep>,
}

/// Every sweep point in flag order, the first flag varying slowest.
pub fn sweep_points(base: &SimSection, sweeps: &[Sweep]) -> Result<Vec<SimSection>> {
    let mut points = vec![base.clone()];
    for sweep in sweeps {
        let mut next = Vec::with_capacity(points.len() * sweep.values.len());
        for p in &points {
            for v in &sweep.values {
                let mut q = p.clone();
                sweep.apply(&mut q, v)?;
                next.push(q);
            }
        }
        points = next;
    }
    Ok(points)
}

pub fn columns() -> Vec<Column> {
    vec![
        col("channel", None),
        col("distribution_source", None),
        col("n", Some(COUNT)),
        col("blocks", Some(COUNT)),
        col("rate", Some(BITS)),
        col("r2", Some(BITS)),
        col("epsilon", Some(PROB)),
        col("seed", None),
        col("decoder", None),
        col("metric", None),
        col("last_block_multiplier", Some(COUNT)),
        col("trials", Some(COUNT)),
        col("status", None),
        col("reason", None),
        col("effective_rate", Some(BITS)),
        col("effective_r2", Some(BITS)),
        col("message_error_rate", Some(PROB)),
        col("message_error_sigma", Some(PROB)),
        col("quantization_failure_rate", Some(PROB)),
        col("index_error_rate", Some(PROB)),
        col("per_block_error", Some(PROB)),
    ]
}

const METRIC_COLUMNS: usize = 7;

fn distribution(
    cfg: &ExperimentConfig,
    ch: &relaylab_core::RelayChannelSpec,
) -> Result<(String, CodingDistribution)> {
    Ok(match cfg.distribution()? {
        DistributionSource::Explicit(d) => ("explicit".into(), d.clone()),
        DistributionSource::Search(spec) => {
            let sc = spec.resolve(ch);
            let label = format!(
                "search(grid={},yhat={})",
                sc.grid_resolution, sc.yhat_max_size
            );
            (label, cf_rate(ch, &sc, CfMode::MinForm)?.distribution)
        }
    })
}

/// Rows whose codebooks or joint search space exceed the simulator's caps are
/// kept and marked `skipped`.
pub fn simulate_table(
    cfg: &ExperimentConfig,
    base: &Path,
    overrides: &SimOverrides,
) -> Result<Table> {
    let ch = cfg.channel.load(base)?;
    let (source, d) = distribution(cfg, &ch)?;
    let mut sim = cfg.sim()?.clone();
    if let Some(seed) = overrides.seed {
        sim.seed = seed;
    }
    if let Some(trials) = overrides.trials {
        sim.trials = trials;
    }
    let label = cfg.channel.label();
    let mut table = Table::new(columns());
    for point in sweep_points(&sim, &overrides.sweeps)? {
        let params = point.params();
        let mut row: Vec<Cell> = vec![
            label.clone().into(),
            source.clone().into(),
            point.n.into(),
            point.blocks.into(),
            point.rate.into(),
            point.r2.into(),
            point.epsilon.into(),
            point.seed.into(),
            point.decoder.as_str().into(),
            point.metric.as_str().into(),
            point.last_block_multiplier.into(),
            point.trials.into(),
        ];
        match run_monte_carlo(&ch, &d, &params, point.trials) {
            Ok(s) => {
                row.extend(["ok".into(), Cell::Missing]);
                row.extend([
                    params.effective_rate()?.into(),
                    params.effective_r2()?.into(),
                    s.message_error_rate.into(),
                    s.message_error_sigma().into(),
                    s.quantization_failure_rate.into(),
                    s.index_error_rate.into(),
                    s.per_block_error
                        .iter()
                        .map(f64::to_string)
                        .collect::<Vec<_>>()
                        .join(";")
                        .into(),
                ]);
            }
            Err(
                e @ (CoreError::CodebookTooLarge { .. } | CoreError::SearchSpaceTooLarge { .. }),
            ) => {
                row.extend(["skipped".into(), e.to_string().into()]);
                row.extend(std::iter::repeat_n(Cell::Missing, METRIC_COLUMNS));
            }
            Err(e) => return Err(e).with_context(|| format!("simulating {}", describe(&point))),
        }
        table.push(row);
    }
    Ok(table)
}

fn describe(p: &SimSection) -> String {
    format!(
        "n={} B={} R={} R2={} decoder={}",
        p.n,
        p.blocks,
        p.rate,
        p.r2,
        p.decoder.as_str()
    )
}
