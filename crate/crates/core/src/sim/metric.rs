//! Decision statistics on aligned codeword tuples.
//!
//! A [`CellLaw`] is the target law of a few named variables flattened into
//! cells. Given aligned sequences it answers either the robust-typicality
//! test or the information-density score
//!
//! ```text
//! Σ_i log₂ P(a_i) − Σ_groups log₂ P_group(a_i)
//! ```
//!
//! where the groups are the pieces generated independently of each other
//! under a wrong hypothesis. A tuple that hits a zero-probability cell scores
//! −∞ under either metric.

use crate::error::Result;
use crate::info::JointPmf;

use super::{Metric, Symbol};

pub(crate) struct CellLaw {
    /// Stride of each requested axis, in request order.
    strides: Vec<usize>,
    probs: Vec<f64>,
    density: Vec<f64>,
}

impl CellLaw {
    pub(crate) fn new(joint: &JointPmf, axes: &[&str], groups: &[&[&str]]) -> Result<Self> {
        let m = joint.marginalize(axes)?;
        let shape = m.shape();
        let mut own_strides = vec![1usize; shape.len()];
        for i in (0..shape.len().saturating_sub(1)).rev() {
            own_strides[i] = own_strides[i + 1] * shape[i + 1];
        }
        let strides = axes
            .iter()
            .map(|name| m.axis_index(name).map(|i| own_strides[i]))
            .collect::<Result<Vec<_>>>()?;

        let group_tables = groups
            .iter()
            .map(|g| {
                let gm = m.marginalize(g)?;
                let pos = gm
                    .axes()
                    .iter()
                    .map(|a| m.axis_index(&a.name))
                    .collect::<Result<Vec<_>>>()?;
                Ok((gm, pos))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut symbols = vec![0usize; shape.len()];
        let density = m
            .probs()
            .iter()
            .enumerate()
            .map(|(flat, &p)| {
                if p == 0.0 {
                    return f64::NEG_INFINITY;
                }
                let mut rest = flat;
                for (s, &st) in symbols.iter_mut().zip(&own_strides) {
                    *s = rest / st;
                    rest %= st;
                }
                let mut ld = p.log2();
                for (gm, pos) in &group_tables {
                    let sub: Vec<usize> = pos.iter().map(|&i| symbols[i]).collect();
                    ld -= gm.get(&sub).log2();
                }
                ld
            })
            .collect();
        Ok(Self {
            strides,
            probs: m.probs().to_vec(),
            density,
        })
    }

    /// Per-position partial cell index of the sequences that stay fixed
    /// across candidates. `fixed` pairs an axis position (request order) with
    /// its sequence.
    pub(crate) fn base(&self, n: usize, fixed: &[(usize, &[Symbol])]) -> Vec<u32> {
        let mut base = vec![0u32; n];
        for &(axis, seq) in fixed {
            let st = self.strides[axis] as u32;
            for (b, &s) in base.iter_mut().zip(seq) {
                *b += s as u32 * st;
            }
        }
        base
    }

    /// Statistic of one candidate: 0 or −∞ under typicality, the
    /// information density under max-score.
    pub(crate) fn evaluate(
        &self,
        base: &[u32],
        varying: &[(usize, &[Symbol])],
        metric: Metric,
        epsilon: f64,
        counts: &mut Vec<u32>,
    ) -> f64 {
        match metric {
            Metric::MaxScore => {
                let mut total = 0.0;
                for (i, &b) in base.iter().enumerate() {
                    let cell = self.cell(b, varying, i);
                    total += self.density[cell];
                    if total == f64::NEG_INFINITY {
                        break;
                    }
                }
                total
            }
            Metric::Typicality => {
                counts.clear();
                counts.resize(self.probs.len(), 0);
                for (i, &b) in base.iter().enumerate() {
                    let cell = self.cell(b, varying, i);
                    if self.probs[cell] == 0.0 {
                        return f64::NEG_INFINITY;
                    }
                    counts[cell] += 1;
                }
                let n = base.len() as f64;
                let typical = counts
                    .iter()
                    .zip(&self.probs)
                    .all(|(&c, &p)| (c as f64 / n - p).abs() <= epsilon * p);
                if typical {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    #[inline]
    fn cell(&self, base: u32, varying: &[(usize, &[Symbol])], i: usize) -> usize {
        let mut cell = base as usize;
        for &(axis, seq) in varying {
            cell += seq[i] as usize * self.strides[axis];
        }
        cell
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{is_jointly_typical, Alphabet, TypicalityParams};
    use proptest::prelude::*;

    fn law() -> JointPmf {
        // A (size 2) x B (size 3), one zero cell
        JointPmf::new(
            [
                ("A", Alphabet::new(2).unwrap()),
                ("B", Alphabet::new(3).unwrap()),
            ],
            vec![0.2, 0.1, 0.2, 0.0, 0.3, 0.2],
        )
        .unwrap()
    }

    #[test]
    fn density_of_independent_law_is_zero() {
        let j = JointPmf::new(
            [
                ("A", Alphabet::new(2).unwrap()),
                ("B", Alphabet::new(2).unwrap()),
            ],
            vec![0.12, 0.28, 0.18, 0.42],
        )
        .unwrap();
        let c = CellLaw::new(&j, &["A", "B"], &[&["A"], &["B"]]).unwrap();
        assert!(c.density.iter().all(|d| d.abs() < 1e-12));
    }

    #[test]
    fn axis_order_follows_request() {
        let c = CellLaw::new(&law(), &["B", "A"], &[&["B"], &["A"]]).unwrap();
        let a: [Symbol; 1] = [1];
        let b: [Symbol; 1] = [0];
        // (A=1, B=0) has probability 0
        let base = c.base(1, &[(0, &b)]);
        let mut scratch = Vec::new();
        assert_eq!(
            c.evaluate(&base, &[(1, &a)], Metric::MaxScore, 0.5, &mut scratch),
            f64::NEG_INFINITY
        );
        let a0: [Symbol; 1] = [0];
        let s = c.evaluate(&base, &[(1, &a0)], Metric::MaxScore, 0.5, &mut scratch);
        // log2(0.2 / (0.5 * 0.2))
        assert!((s - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn typicality_matches_reference_predicate(
            pairs in proptest::collection::vec((0u16..2, 0u16..3), 1..40),
            eps in 0.05f64..0.95,
        ) {
            let j = law();
            let a: Vec<Symbol> = pairs.iter().map(|p| p.0).collect();
            let b: Vec<Symbol> = pairs.iter().map(|p| p.1).collect();
            let want = is_jointly_typical(&[&a[..], &b[..]], &j, TypicalityParams::new(eps).unwrap()).unwrap();
            let c = CellLaw::new(&j, &["A", "B"], &[&["A"], &["B"]]).unwrap();
            let base = c.base(a.len(), &[(1, &b)]);
            let got = c.evaluate(&base, &[(0, &a)], Metric::Typicality, eps, &mut Vec::new());
            prop_assert_eq!(got == 0.0, want);
        }
    }
}
