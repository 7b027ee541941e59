//! Achievable-rate bounds of short-message quantize-forward on a
//! discrete memoryless relay channel.
//!
//! The joint law of one channel use factors as
//!
//! ```text
//! P(x1) P(x2) p(y2, y3 | x1, x2) q(ŷ | x2, y2)
//! ```
//!
//! and every bound is a combination of conditional mutual informations of
//! that law. The relay needs its quantization-index rate `R2` above
//! `I(Ŷ;Y2|X2)`; the sink, decoding the message and the index jointly, needs
//! the three multiple-access style bounds on `R`, `R2` and `R + R2`.
//! Eliminating `R2` leaves two bounds on `R` and one condition that does not
//! involve `R` at all; when that condition fails, a quantizer independent of
//! everything still achieves `I(X1;Y3|X2)`.

mod fme;
mod search;

pub use fme::fme_oracle_check;
pub use search::{cf_rate, CfMode, CfResult, SearchConfig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{Alphabet, JointPmf};

/// Axis names of the joint table produced by [`build_joint`].
pub mod axis {
    pub const X1: &str = "X1";
    pub const X2: &str = "X2";
    pub const Y2: &str = "Y2";
    pub const Y3: &str = "Y3";
    pub const YHAT: &str = "Yhat";
}

/// Margin by which a rate condition must hold before it is treated as met.
pub const STRICT_MARGIN: f64 = 1e-12;

const ROW_TOLERANCE: f64 = 1e-12;

/// Memoryless relay channel `p(y2, y3 | x1, x2)`.
///
/// The kernel is stored flat, indexed `[x1][x2][y2][y3]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayChannelSpec {
    pub alph_x1: Alphabet,
    pub alph_x2: Alphabet,
    pub alph_y2: Alphabet,
    pub alph_y3: Alphabet,
    kernel: Vec<f64>,
}

impl RelayChannelSpec {
    pub fn new(
        alph_x1: Alphabet,
        alph_x2: Alphabet,
        alph_y2: Alphabet,
        alph_y3: Alphabet,
        kernel: Vec<f64>,
    ) -> Result<Self> {
        let spec = Self {
            alph_x1,
            alph_x2,
            alph_y2,
            alph_y3,
            kernel,
        };
        let expected = spec.input_pairs() * spec.row_len();
        if spec.kernel.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                actual: spec.kernel.len(),
            });
        }
        if let Some((index, &value)) = spec
            .kernel
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.is_finite() && **p >= 0.0))
        {
            return Err(Error::InvalidProbability { index, value });
        }
        for x1 in 0..alph_x1.size() {
            for x2 in 0..alph_x2.size() {
                let sum: f64 = spec.row(x1, x2).iter().sum();
                if (sum - 1.0).abs() > ROW_TOLERANCE {
                    return Err(Error::KernelRowSum { x1, x2, sum });
                }
            }
        }
        Ok(spec)
    }

    fn input_pairs(&self) -> usize {
        self.alph_x1.size() * self.alph_x2.size()
    }

    /// Number of `(y2, y3)` outputs per input pair.
    pub fn row_len(&self) -> usize {
        self.alph_y2.size() * self.alph_y3.size()
    }

    /// Output distribution for one input pair, flattened as `y2 * |Y3| + y3`.
    pub fn row(&self, x1: usize, x2: usize) -> &[f64] {
        let start = (x1 * self.alph_x2.size() + x2) * self.row_len();
        &self.kernel[start..start + self.row_len()]
    }

    pub fn prob(&self, x1: usize, x2: usize, y2: usize, y3: usize) -> f64 {
        self.row(x1, x2)[y2 * self.alph_y3.size() + y3]
    }

    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }
}

/// Input laws and relay quantizer `q(ŷ | x2, y2)`.
///
/// `q` is stored flat, indexed `[x2][y2][ŷ]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionRepr", into = "DistributionRepr")]
pub struct CodingDistribution {
    pub p_x1: Vec<f64>,
    pub p_x2: Vec<f64>,
    pub alph_yhat: Alphabet,
    alph_y2: Alphabet,
    q: Vec<f64>,
}

/// JSON shape: `q` nested as `[x2][y2][ŷ]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct DistributionRepr {
    p_x1: Vec<f64>,
    p_x2: Vec<f64>,
    q: Vec<Vec<Vec<f64>>>,
}

impl TryFrom<DistributionRepr> for CodingDistribution {
    type Error = Error;

    fn try_from(r: DistributionRepr) -> Result<Self> {
        let y2 = r.q.first().map_or(0, Vec::len);
        let yhat = r.q.first().and_then(|c| c.first()).map_or(0, Vec::len);
        if r.q.len() != r.p_x2.len()
            || r.q.iter().any(|c| c.len() != y2)
            || r.q.iter().flatten().any(|col| col.len() != yhat)
        {
            return Err(Error::InvalidDistribution(
                "q must be a full [x2][y2][yhat] array".into(),
            ));
        }
        let flat = r.q.into_iter().flatten().flatten().collect();
        CodingDistribution::new(
            r.p_x1,
            r.p_x2,
            Alphabet::new(y2)?,
            Alphabet::new(yhat)?,
            flat,
        )
    }
}

impl From<CodingDistribution> for DistributionRepr {
    fn from(d: CodingDistribution) -> Self {
        let q = (0..d.p_x2.len())
            .map(|x2| {
                (0..d.alph_y2.size())
                    .map(|y2| d.column(x2, y2).to_vec())
                    .collect()
            })
            .collect();
        DistributionRepr {
            p_x1: d.p_x1,
            p_x2: d.p_x2,
            q,
        }
    }
}

fn check_pmf(name: &str, p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution(format!("{name} is empty")));
    }
    if p.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidDistribution(format!(
            "{name} has a negative or non-finite entry"
        )));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > ROW_TOLERANCE {
        return Err(Error::InvalidDistribution(format!("{name} sums to {sum}")));
    }
    Ok(())
}

impl CodingDistribution {
    pub fn new(
        p_x1: Vec<f64>,
        p_x2: Vec<f64>,
        alph_y2: Alphabet,
        alph_yhat: Alphabet,
        q: Vec<f64>,
    ) -> Result<Self> {
        check_pmf("p_x1", &p_x1)?;
        check_pmf("p_x2", &p_x2)?;
        let expected = p_x2.len() * alph_y2.size() * alph_yhat.size();
        if q.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                actual: q.len(),
            });
        }
        let d = Self {
            p_x1,
            p_x2,
            alph_yhat,
            alph_y2,
            q,
        };
        for x2 in 0..d.p_x2.len() {
            for y2 in 0..alph_y2.size() {
                check_pmf(&format!("q(.|x2={x2}, y2={y2})"), d.column(x2, y2))?;
            }
        }
        Ok(d)
    }

    /// `ŷ = y2`.
    pub fn identity_quantizer(p_x1: Vec<f64>, p_x2: Vec<f64>, alph_y2: Alphabet) -> Result<Self> {
        let ny2 = alph_y2.size();
        let mut q = vec![0.0; p_x2.len() * ny2 * ny2];
        for x2 in 0..p_x2.len() {
            for y2 in 0..ny2 {
                q[(x2 * ny2 + y2) * ny2 + y2] = 1.0;
            }
        }
        Self::new(p_x1, p_x2, alph_y2, alph_y2, q)
    }

    /// Single-symbol `Ŷ`, independent of everything.
    pub fn constant_quantizer(p_x1: Vec<f64>, p_x2: Vec<f64>, alph_y2: Alphabet) -> Result<Self> {
        let q = vec![1.0; p_x2.len() * alph_y2.size()];
        Self::new(p_x1, p_x2, alph_y2, Alphabet::new(1)?, q)
    }

    pub fn alph_y2(&self) -> Alphabet {
        self.alph_y2
    }

    /// `q(· | x2, y2)`.
    pub fn column(&self, x2: usize, y2: usize) -> &[f64] {
        let k = self.alph_yhat.size();
        let start = (x2 * self.alph_y2.size() + y2) * k;
        &self.q[start..start + k]
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// Whether `Ŷ` ignores `(X2, Y2)`: every column is the same law.
    pub fn is_degenerate(&self) -> bool {
        let first = self.column(0, 0);
        (0..self.p_x2.len())
            .flat_map(|x2| (0..self.alph_y2.size()).map(move |y2| (x2, y2)))
            .all(|(x2, y2)| self.column(x2, y2) == first)
    }

    pub fn check_compatible(&self, ch: &RelayChannelSpec) -> Result<()> {
        let mut problems = Vec::new();
        if self.p_x1.len() != ch.alph_x1.size() {
            problems.push(format!(
                "p_x1 has {} entries, |X1| = {}",
                self.p_x1.len(),
                ch.alph_x1.size()
            ));
        }
        if self.p_x2.len() != ch.alph_x2.size() {
            problems.push(format!(
                "p_x2 has {} entries, |X2| = {}",
                self.p_x2.len(),
                ch.alph_x2.size()
            ));
        }
        if self.alph_y2 != ch.alph_y2 {
            problems.push(format!(
                "quantizer expects |Y2| = {}, channel has {}",
                self.alph_y2.size(),
                ch.alph_y2.size()
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch(problems.join("; ")))
        }
    }

    /// `P(ŷ | x2) = Σ_{y2} P(y2 | x2) q(ŷ | x2, y2)`, the law the quantization
    /// codewords are drawn from. Indexed `[x2][ŷ]`.
    pub fn yhat_given_x2(&self, ch: &RelayChannelSpec) -> Vec<Vec<f64>> {
        let ny3 = ch.alph_y3.size();
        (0..ch.alph_x2.size())
            .map(|x2| {
                let mut out = vec![0.0; self.alph_yhat.size()];
                for y2 in 0..ch.alph_y2.size() {
                    let p_y2: f64 = (0..ch.alph_x1.size())
                        .map(|x1| {
                            let row = ch.row(x1, x2);
                            self.p_x1[x1] * row[y2 * ny3..(y2 + 1) * ny3].iter().sum::<f64>()
                        })
                        .sum();
                    for (o, &qv) in out.iter_mut().zip(self.column(x2, y2)) {
                        *o += p_y2 * qv;
                    }
                }
                let total: f64 = out.iter().sum();
                out.iter_mut().for_each(|v| *v /= total);
                out
            })
            .collect()
    }
}

/// Joint table on `(X1, X2, Y2, Y3, Ŷ)` from the product factorization.
pub fn build_joint(ch: &RelayChannelSpec, d: &CodingDistribution) -> Result<JointPmf> {
    d.check_compatible(ch)?;
    let (n1, n2, ny2, ny3, nh) = (
        ch.alph_x1.size(),
        ch.alph_x2.size(),
        ch.alph_y2.size(),
        ch.alph_y3.size(),
        d.alph_yhat.size(),
    );
    let mut probs = Vec::with_capacity(n1 * n2 * ny2 * ny3 * nh);
    for x1 in 0..n1 {
        for x2 in 0..n2 {
            let px = d.p_x1[x1] * d.p_x2[x2];
            for y2 in 0..ny2 {
                let col = d.column(x2, y2);
                for y3 in 0..ny3 {
                    let pk = px * ch.prob(x1, x2, y2, y3);
                    probs.extend(col.iter().map(|qv| pk * qv));
                }
            }
        }
    }
    JointPmf::normalized(
        [
            (axis::X1, ch.alph_x1),
            (axis::X2, ch.alph_x2),
            (axis::Y2, ch.alph_y2),
            (axis::Y3, ch.alph_y3),
            (axis::YHAT, d.alph_yhat),
        ],
        probs,
    )
}

/// Every rate bound for one coding distribution, in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    /// Relay covering requirement on `R2`: `I(Ŷ;Y2|X2)`.
    pub quantization_bound: f64,
    /// Sink bound on `R`: `I(X1;Ŷ Y3|X2)`.
    pub message_bound: f64,
    /// Sink bound on `R2`: `I(X2;Y3) + I(Ŷ;X1 Y3|X2)`.
    pub index_bound: f64,
    /// Sink bound on `R + R2`: `I(X1 X2;Y3) + I(Ŷ;X1 Y3|X2)`.
    pub sum_bound: f64,
    /// After eliminating `R2`: `I(X1;Ŷ Y3|X2)`.
    pub projected_message_bound: f64,
    /// After eliminating `R2`: `I(X1 X2;Y3) − I(Ŷ;Y2|X1 X2 Y3)`.
    pub projected_sum_bound: f64,
    /// `I(Ŷ;Y2|X1 X2 Y3)`, must stay below the relay-link term.
    pub excess_quantization: f64,
    /// `I(X2;Y3)`.
    pub relay_link: f64,
    /// `I(X1;Y3|X2)`, the rate left when the relay link condition fails.
    pub direct_rate: f64,
    /// Backward-decoding bound on `R2`: `I(X2;Y3|X1) + I(Ŷ;X1 Y3|X2)`.
    pub backward_index_bound: f64,
    /// `I(X2;Y3|X1)`, the backward-decoding relay-link term.
    pub backward_relay_link: f64,
    pub sliding_rate: f64,
    pub backward_rate: f64,
}

impl RegionReport {
    /// `excess_quantization < relay_link`, with [`STRICT_MARGIN`].
    pub fn sliding_condition_holds(&self) -> bool {
        self.excess_quantization < self.relay_link - STRICT_MARGIN
    }

    /// `excess_quantization < backward_relay_link`, with [`STRICT_MARGIN`].
    pub fn backward_condition_holds(&self) -> bool {
        self.excess_quantization < self.backward_relay_link - STRICT_MARGIN
    }
}

pub fn evaluate_bounds(ch: &RelayChannelSpec, d: &CodingDistribution) -> Result<RegionReport> {
    use axis::*;
    let j = build_joint(ch, d)?;
    let mi = |a: &[&str], b: &[&str], c: &[&str]| j.mutual_information(a, b, c);

    let quantization_bound = mi(&[YHAT], &[Y2], &[X2])?;
    let message_bound = mi(&[X1], &[YHAT, Y3], &[X2])?;
    let side_info = mi(&[YHAT], &[X1, Y3], &[X2])?;
    let relay_link = mi(&[X2], &[Y3], &[])?;
    let both_inputs = mi(&[X1, X2], &[Y3], &[])?;
    let excess_quantization = mi(&[YHAT], &[Y2], &[X1, X2, Y3])?;
    let direct_rate = mi(&[X1], &[Y3], &[X2])?;
    let backward_relay_link = mi(&[X2], &[Y3], &[X1])?;

    let mut report = RegionReport {
        quantization_bound,
        message_bound,
        index_bound: relay_link + side_info,
        sum_bound: both_inputs + side_info,
        projected_message_bound: message_bound,
        projected_sum_bound: (both_inputs - excess_quantization).max(0.0),
        excess_quantization,
        relay_link,
        direct_rate,
        backward_index_bound: backward_relay_link + side_info,
        backward_relay_link,
        sliding_rate: 0.0,
        backward_rate: 0.0,
    };
    let joint_rate = report
        .projected_message_bound
        .min(report.projected_sum_bound);
    // When the condition holds joint_rate already exceeds direct_rate, so the
    // max only matters for the backward branch, where the condition can hold
    // while joint_rate sits below direct_rate.
    report.sliding_rate = if report.sliding_condition_holds() {
        joint_rate.max(direct_rate)
    } else {
        direct_rate
    };
    report.backward_rate = if report.backward_condition_holds() {
        joint_rate.max(direct_rate)
    } else {
        direct_rate
    };
    Ok(report)
}
