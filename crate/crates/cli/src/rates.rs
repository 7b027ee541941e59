//! `rates`: every bound for one coding distribution, or for the argmax of the
//! compress-forward search.

use std::path::Path;

use anyhow::Result;
use relaylab_core::region::{axis, STRICT_MARGIN};
use relaylab_core::{
    build_joint, cf_rate, evaluate_bounds, CfMode, CodingDistribution, RegionReport,
    RelayChannelSpec,
};

use crate::config::{DistributionSource, ExperimentConfig};
use crate::output::{col, Cell, Column, Table, BITS, COUNT};

pub fn columns() -> Vec<Column> {
    vec![
        col("channel", None),
        col("distribution_source", None),
        col("grid_resolution", Some(COUNT)),
        col("yhat_max_size", Some(COUNT)),
        col("include_degenerate", None),
        col("quantization_bound", Some(BITS)),
        col("message_bound", Some(BITS)),
        col("index_bound", Some(BITS)),
        col("sum_bound", Some(BITS)),
        col("projected_message_bound", Some(BITS)),
        col("projected_sum_bound", Some(BITS)),
        col("excess_quantization", Some(BITS)),
        col("relay_link", Some(BITS)),
        col("direct_rate", Some(BITS)),
        col("backward_index_bound", Some(BITS)),
        col("backward_relay_link", Some(BITS)),
        col("sliding_condition", None),
        col("backward_condition", None),
        col("sliding_rate", Some(BITS)),
        col("backward_rate", Some(BITS)),
        col("cf_minform", Some(BITS)),
        col("cf_constrained", Some(BITS)),
        col("distribution", None),
    ]
}

/// The constrained compress-forward objective of one distribution, or
/// `None` when the distribution violates its constraint.
pub fn constrained_objective(ch: &RelayChannelSpec, d: &CodingDistribution) -> Result<Option<f64>> {
    use axis::*;
    let j = build_joint(ch, d)?;
    let lhs = j.mutual_information(&[YHAT], &[Y2], &[X2, Y3])?;
    let rhs = j.mutual_information(&[X2], &[Y3], &[])?;
    if lhs > rhs + STRICT_MARGIN {
        return Ok(None);
    }
    Ok(Some(j.mutual_information(&[X1], &[YHAT, Y3], &[X2])?))
}

/// The min-form compress-forward objective of one distribution.
pub fn minform_objective(r: &RegionReport) -> f64 {
    r.projected_message_bound.min(r.projected_sum_bound)
}

pub fn rates_table(cfg: &ExperimentConfig, base: &Path) -> Result<Table> {
    let ch = cfg.channel.load(base)?;
    let mut table = Table::new(columns());
    let (source, grid, d, minform, constrained) = match cfg.distribution()? {
        DistributionSource::Explicit(d) => {
            let r = evaluate_bounds(&ch, d)?;
            (
                "explicit",
                None,
                d.clone(),
                minform_objective(&r),
                constrained_objective(&ch, d)?,
            )
        }
        DistributionSource::Search(spec) => {
            let sc = spec.resolve(&ch);
            let best = cf_rate(&ch, &sc, CfMode::MinForm)?;
            let other = cf_rate(&ch, &sc, CfMode::Constrained)?;
            (
                "search",
                Some(sc),
                best.distribution,
                best.rate,
                Some(other.rate),
            )
        }
    };
    let r = evaluate_bounds(&ch, &d)?;
    let mut row: Vec<Cell> = vec![
        cfg.channel.label().into(),
        source.into(),
        grid.map(|g| g.grid_resolution).into(),
        grid.map(|g| g.yhat_max_size).into(),
        grid.map(|g| g.include_degenerate).into(),
    ];
    row.extend(
        [
            r.quantization_bound,
            r.message_bound,
            r.index_bound,
            r.sum_bound,
            r.projected_message_bound,
            r.projected_sum_bound,
            r.excess_quantization,
            r.relay_link,
            r.direct_rate,
            r.backward_index_bound,
            r.backward_relay_link,
        ]
        .map(Cell::from),
    );
    row.extend([
        r.sliding_condition_holds().into(),
        r.backward_condition_holds().into(),
        r.sliding_rate.into(),
        r.backward_rate.into(),
        minform.into(),
        constrained.into(),
        serde_json::to_string(&d)?.into(),
    ]);
    table.push(row);
    Ok(table)
}
