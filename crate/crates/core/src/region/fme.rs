use crate::error::{Error, Result};

use super::{evaluate_bounds, CodingDistribution, RelayChannelSpec};

/// Projects the four-constraint `(R, R2)` system onto `R` numerically and
/// pairs it with the closed-form eliminated rate.
///
/// `R2` is scanned over `r2_grid + 1` evenly spaced points of
/// `[quantization_bound, index_bound]`; at each point the largest `R` allowed
/// by the message and sum constraints is taken. If the interval is empty the
/// scan falls back to the direct rate, which a quantizer independent of
/// everything achieves. Returns `(scanned, closed_form)`.
pub fn fme_oracle_check(
    ch: &RelayChannelSpec,
    d: &CodingDistribution,
    r2_grid: usize,
) -> Result<(f64, f64)> {
    if r2_grid < 100 {
        return Err(Error::InvalidSearch(format!(
            "r2_grid must be at least 100, got {r2_grid}"
        )));
    }
    let r = evaluate_bounds(ch, d)?;
    let (lo, hi) = (r.quantization_bound, r.index_bound);
    let scanned = if lo <= hi {
        (0..=r2_grid)
            .map(|k| {
                let r2 = lo + (hi - lo) * k as f64 / r2_grid as f64;
                r.message_bound.min(r.sum_bound - r2).max(0.0)
            })
            .fold(0.0_f64, f64::max)
            .max(r.direct_rate)
    } else {
        r.direct_rate
    };
    Ok((scanned, r.sliding_rate))
}
