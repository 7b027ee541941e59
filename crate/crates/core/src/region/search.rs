//! Grid search for the compress-forward rate.
//!
//! Candidates are every `(P_X1, P_X2, q)` whose probabilities are multiples of
//! `1 / grid_resolution`, with `|Ŷ| = yhat_max_size` (smaller quantizer
//! alphabets are embedded by leaving symbols unused).
//!
//! For fixed input laws, the quantizer enters every objective only through
//! three entropies that split into independent per-`x2` terms:
//!
//! ```text
//! T1(x2) = H(Y3 Ŷ | X2 = x2)·P(x2)      summed: H(X2 Y3 Ŷ) − H(X2)
//! T2(x2) = H(X1 Y3 Ŷ | X2 = x2)·P(x2)   summed: H(X1 X2 Y3 Ŷ) − H(X2)
//! T3(x2) = Σ_{y2} P(x2, y2) H(q(·|x2, y2))
//! ```
//!
//! (written above with the `H(X2)` offsets folded in; the code keeps the raw
//! `−Σ p log p` sums). Each objective is monotone in two per-slice scores, so
//! every slice is reduced to its Pareto front before the slices are combined.
//! The pruning drops only points that can never be the first maximizer in
//! grid order, so the result is the same as exhaustive enumeration.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{entropy_bits, Alphabet};

use super::{CodingDistribution, RelayChannelSpec};

/// Upper limit on per-slice quantizer evaluations for one search.
pub const MAX_SLICE_EVALUATIONS: u128 = 200_000_000;

const FEASIBILITY_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Probability step is `1 / grid_resolution`.
    pub grid_resolution: usize,
    pub yhat_max_size: usize,
    /// Keep quantizers whose output ignores `(X2, Y2)`.
    pub include_degenerate: bool,
}

impl SearchConfig {
    /// Defaults to `|Ŷ| = |Y2| + 1` with the degenerate quantizer included.
    pub fn for_channel(ch: &RelayChannelSpec, grid_resolution: usize) -> Self {
        Self {
            grid_resolution,
            yhat_max_size: ch.alph_y2.size() + 1,
            include_degenerate: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_resolution < 2 {
            return Err(Error::InvalidSearch(format!(
                "grid_resolution must be at least 2, got {}",
                self.grid_resolution
            )));
        }
        if self.yhat_max_size < 1 {
            return Err(Error::InvalidSearch(
                "yhat_max_size must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CfMode {
    /// Maximize `min(projected_message_bound, projected_sum_bound)`.
    MinForm,
    /// Maximize `I(X1;Ŷ Y3|X2)` subject to `I(Ŷ;Y2|X2 Y3) ≤ I(X2;Y3)`.
    Constrained,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CfResult {
    pub rate: f64,
    pub distribution: CodingDistribution,
    /// Number of `(P_X1, P_X2)` grid pairs searched.
    pub input_pairs: usize,
}

/// All compositions of `total` into `dim` nonnegative parts, lexicographic.
fn simplex_grid(dim: usize, total: usize) -> Vec<Vec<usize>> {
    fn rec(dim: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if dim == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(dim - 1, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, total, &mut Vec::with_capacity(dim), &mut out);
    out
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

fn to_probs(point: &[usize], res: usize) -> Vec<f64> {
    point.iter().map(|&c| c as f64 / res as f64).collect()
}

fn xlogx(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// One quantizer choice for a single `x2` slice, scored on the two axes the
/// objective is monotone in.
#[derive(Debug, Clone, Copy)]
struct SlicePoint {
    u: f64,
    v: f64,
    /// Mixed-radix index over the slice's column choices, `y2 = 0` most
    /// significant.
    idx: usize,
    /// Column index shared by every `y2`, when there is one.
    flat: Option<usize>,
}

struct Columns {
    probs: Vec<Vec<f64>>,
    entropy: Vec<f64>,
}

impl Columns {
    fn new(yhat: usize, res: usize) -> Self {
        let probs: Vec<Vec<f64>> = simplex_grid(yhat, res)
            .iter()
            .map(|p| to_probs(p, res))
            .collect();
        let entropy = probs.iter().map(|c| entropy_bits(c)).collect();
        Self { probs, entropy }
    }

    fn len(&self) -> usize {
        self.probs.len()
    }
}

/// `P(x1, x2, y2, y3)` for one input pair plus the quantizer-free constants.
struct InputLaw {
    n1: usize,
    ny2: usize,
    ny3: usize,
    /// `[x2][x1][y2][y3]`, sliced by `x2` first.
    slices: Vec<Vec<f64>>,
    p_x2: Vec<f64>,
    /// `H(X1 X2) − H(X2)`.
    c_message: f64,
    /// `H(X1 X2) + H(Y3)`.
    c_sum: f64,
    /// `H(X2) + H(Y3)`.
    c_constraint: f64,
}

impl InputLaw {
    fn new(ch: &RelayChannelSpec, p1: &[f64], p2: &[f64]) -> Self {
        let (n1, n2, ny2, ny3) = (
            ch.alph_x1.size(),
            ch.alph_x2.size(),
            ch.alph_y2.size(),
            ch.alph_y3.size(),
        );
        let mut slices = vec![vec![0.0; n1 * ny2 * ny3]; n2];
        let mut x1x2 = vec![0.0; n1 * n2];
        let mut y3 = vec![0.0; ny3];
        for x1 in 0..n1 {
            for (x2, slice) in slices.iter_mut().enumerate() {
                let px = p1[x1] * p2[x2];
                x1x2[x1 * n2 + x2] = px;
                let row = ch.row(x1, x2);
                for (k, &pk) in row.iter().enumerate() {
                    let p = px * pk;
                    slice[x1 * ny2 * ny3 + k] = p;
                    y3[k % ny3] += p;
                }
            }
        }
        let h_x1x2 = entropy_bits(&x1x2);
        let h_x2 = entropy_bits(p2);
        let h_y3 = entropy_bits(&y3);
        Self {
            n1,
            ny2,
            ny3,
            slices,
            p_x2: p2.to_vec(),
            c_message: h_x1x2 - h_x2,
            c_sum: h_x1x2 + h_y3,
            c_constraint: h_x2 + h_y3,
        }
    }

    /// `(T1, T2, T3)` for slice `x2` with column `choice[y2]` per `y2`.
    fn slice_terms(
        &self,
        x2: usize,
        cols: &Columns,
        choice: &[usize],
        scratch: &mut Vec<f64>,
    ) -> (f64, f64, f64) {
        let (n1, ny2, ny3) = (self.n1, self.ny2, self.ny3);
        let nh = cols.probs[0].len();
        let slice = &self.slices[x2];
        // P(x1, y3, ŷ) within the slice
        scratch.clear();
        scratch.resize(n1 * ny3 * nh, 0.0);
        let mut t3 = 0.0;
        for (y2, &c) in choice.iter().enumerate() {
            let col = &cols.probs[c];
            let mut p_y2 = 0.0;
            for x1 in 0..n1 {
                for y3 in 0..ny3 {
                    let p = slice[(x1 * ny2 + y2) * ny3 + y3];
                    if p == 0.0 {
                        continue;
                    }
                    p_y2 += p;
                    let out = &mut scratch[(x1 * ny3 + y3) * nh..(x1 * ny3 + y3 + 1) * nh];
                    for (o, &qv) in out.iter_mut().zip(col) {
                        *o += p * qv;
                    }
                }
            }
            t3 += p_y2 * cols.entropy[c];
        }
        let t2 = -scratch.iter().map(|&p| xlogx(p)).sum::<f64>();
        let mut t1 = 0.0;
        for y3 in 0..ny3 {
            for h in 0..nh {
                let s: f64 = (0..n1).map(|x1| scratch[(x1 * ny3 + y3) * nh + h]).sum();
                t1 -= xlogx(s);
            }
        }
        (t1, t2, t3)
    }
}

fn decode_choice(mut idx: usize, ny2: usize, ncols: usize, out: &mut [usize]) {
    for y2 in (0..ny2).rev() {
        out[y2] = idx % ncols;
        idx /= ncols;
    }
}

/// Drops points that are strictly beaten on both axes, and exact duplicates
/// of an earlier-indexed point. Neither can be the first maximizer of a
/// monotone objective of the slice sums.
fn pareto_prune(mut pts: Vec<SlicePoint>) -> Vec<SlicePoint> {
    pts.sort_by(|a, b| {
        b.u.total_cmp(&a.u)
            .then(b.v.total_cmp(&a.v))
            .then(a.idx.cmp(&b.idx))
    });
    let mut kept = Vec::new();
    let mut best_v_above = f64::NEG_INFINITY;
    let mut i = 0;
    while i < pts.len() {
        let u = pts[i].u;
        let mut j = i;
        let mut group_max = f64::NEG_INFINITY;
        let mut last_v = None;
        while j < pts.len() && pts[j].u == u {
            let p = pts[j];
            group_max = group_max.max(p.v);
            if best_v_above <= p.v && last_v != Some(p.v) {
                kept.push(p);
            }
            last_v = Some(p.v);
            j += 1;
        }
        best_v_above = best_v_above.max(group_max);
        i = j;
    }
    kept.sort_by_key(|p| p.idx);
    kept
}

struct PairBest {
    value: f64,
    key: Vec<usize>,
}

fn better(a: &PairBest, b: &PairBest) -> bool {
    match a.value.total_cmp(&b.value) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => a.key < b.key,
    }
}

struct Searcher<'a> {
    ch: &'a RelayChannelSpec,
    cfg: SearchConfig,
    mode: CfMode,
    cols: Columns,
}

impl Searcher<'_> {
    fn slice_points(&self, law: &InputLaw, x2: usize) -> Vec<SlicePoint> {
        let ncols = self.cols.len();
        let ny2 = law.ny2;
        let total = ncols.pow(ny2 as u32);
        let mut choice = vec![0usize; ny2];
        let mut scratch = Vec::new();
        let mut pts = Vec::new();
        let flat_of =
            |choice: &[usize]| choice.iter().all(|&c| c == choice[0]).then_some(choice[0]);
        if law.p_x2[x2] == 0.0 {
            // every choice scores zero. Index 1 differs from index 0 either
            // within the slice or in its shared column, which is enough to
            // dodge the degenerate exclusion whatever the other slices use.
            let keep = if self.cfg.include_degenerate {
                1
            } else {
                total.min(2)
            };
            return (0..keep)
                .map(|idx| {
                    decode_choice(idx, ny2, ncols, &mut choice);
                    SlicePoint {
                        u: 0.0,
                        v: 0.0,
                        idx,
                        flat: flat_of(&choice),
                    }
                })
                .collect();
        }
        for idx in 0..total {
            decode_choice(idx, ny2, ncols, &mut choice);
            let flat = flat_of(&choice);
            let (t1, t2, t3) = law.slice_terms(x2, &self.cols, &choice, &mut scratch);
            let (u, v) = match self.mode {
                CfMode::MinForm => (t1 - t2, t3 - t2),
                CfMode::Constrained => (t1 - t2, -(t1 - t3)),
            };
            pts.push(SlicePoint { u, v, idx, flat });
        }
        if self.cfg.include_degenerate {
            pareto_prune(pts)
        } else {
            // flat choices only become excluded in combination, so they may
            // not prune anything
            let (flats, rest): (Vec<_>, Vec<_>) = pts.into_iter().partition(|p| p.flat.is_some());
            let mut kept = pareto_prune(rest);
            kept.extend(flats);
            kept.sort_by_key(|p| p.idx);
            kept
        }
    }

    fn objective(&self, law: &InputLaw, u: f64, v: f64) -> f64 {
        match self.mode {
            CfMode::MinForm => (law.c_message + u).min(law.c_sum + v),
            CfMode::Constrained => {
                if -v <= law.c_constraint + FEASIBILITY_MARGIN {
                    law.c_message + u
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    fn best_for_pair(&self, law: &InputLaw) -> Option<(f64, Vec<usize>)> {
        let fronts: Vec<Vec<SlicePoint>> = (0..law.p_x2.len())
            .map(|x2| self.slice_points(law, x2))
            .collect();
        let mut best: Option<(f64, Vec<usize>)> = None;
        let mut chosen = Vec::with_capacity(fronts.len());
        self.combine(law, &fronts, 0, 0.0, 0.0, None, &mut chosen, &mut best);
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn combine(
        &self,
        law: &InputLaw,
        fronts: &[Vec<SlicePoint>],
        depth: usize,
        u: f64,
        v: f64,
        flat: Option<Option<usize>>,
        chosen: &mut Vec<usize>,
        best: &mut Option<(f64, Vec<usize>)>,
    ) {
        if depth == fronts.len() {
            if !self.cfg.include_degenerate && matches!(flat, Some(Some(_))) {
                return;
            }
            let value = self.objective(law, u, v);
            if value == f64::NEG_INFINITY {
                return;
            }
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                *best = Some((value, chosen.clone()));
            }
            return;
        }
        for p in &fronts[depth] {
            // track whether every slice so far uses one shared column
            let next_flat = match flat {
                None => Some(p.flat),
                Some(Some(c)) if p.flat == Some(c) => Some(Some(c)),
                Some(_) => Some(None),
            };
            chosen.push(p.idx);
            self.combine(
                law,
                fronts,
                depth + 1,
                u + p.u,
                v + p.v,
                next_flat,
                chosen,
                best,
            );
            chosen.pop();
        }
    }

    fn distribution(
        &self,
        p1: Vec<f64>,
        p2: Vec<f64>,
        slice_idx: &[usize],
    ) -> Result<CodingDistribution> {
        let ny2 = self.ch.alph_y2.size();
        let mut choice = vec![0usize; ny2];
        let mut q = Vec::new();
        for &idx in slice_idx {
            decode_choice(idx, ny2, self.cols.len(), &mut choice);
            for &c in &choice {
                q.extend_from_slice(&self.cols.probs[c]);
            }
        }
        CodingDistribution::new(
            p1,
            p2,
            self.ch.alph_y2,
            Alphabet::new(self.cfg.yhat_max_size)?,
            q,
        )
    }
}

/// Best compress-forward rate on the distribution grid and the first
/// distribution (in grid order) attaining it.
///
/// In constrained mode with no feasible candidate (only possible when the
/// degenerate quantizer is excluded) the rate is 0 and the returned
/// distribution uses uniform inputs with a constant quantizer.
pub fn cf_rate(ch: &RelayChannelSpec, cfg: &SearchConfig, mode: CfMode) -> Result<CfResult> {
    cfg.validate()?;
    let res = cfg.grid_resolution;
    let (n1, n2, ny2) = (ch.alph_x1.size(), ch.alph_x2.size(), ch.alph_y2.size());
    let grid1 = simplex_grid(n1, res);
    let grid2 = simplex_grid(n2, res);
    let ncols = binomial(
        (res + cfg.yhat_max_size - 1) as u128,
        (cfg.yhat_max_size - 1) as u128,
    );
    let evaluations = (grid1.len() as u128)
        .saturating_mul(grid2.len() as u128)
        .saturating_mul(n2 as u128)
        .saturating_mul(ncols.saturating_pow(ny2 as u32));
    if evaluations > MAX_SLICE_EVALUATIONS {
        return Err(Error::SearchTooLarge {
            evaluations,
            limit: MAX_SLICE_EVALUATIONS,
        });
    }
    let searcher = Searcher {
        ch,
        cfg: *cfg,
        mode,
        cols: Columns::new(cfg.yhat_max_size, res),
    };

    let pairs: Vec<(usize, usize)> = (0..grid1.len())
        .flat_map(|a| (0..grid2.len()).map(move |b| (a, b)))
        .collect();
    let results: Vec<Option<PairBest>> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let law = InputLaw::new(ch, &to_probs(&grid1[a], res), &to_probs(&grid2[b], res));
            searcher.best_for_pair(&law).map(|(value, slices)| {
                let mut key = vec![a, b];
                key.extend(slices);
                PairBest { value, key }
            })
        })
        .collect();

    let best = results
        .into_iter()
        .flatten()
        .fold(None::<PairBest>, |acc, cand| match acc {
            Some(cur) if !better(&cand, &cur) => Some(cur),
            _ => Some(cand),
        });
    match best {
        Some(b) => {
            let p1 = to_probs(&grid1[b.key[0]], res);
            let p2 = to_probs(&grid2[b.key[1]], res);
            let distribution = searcher.distribution(p1, p2, &b.key[2..])?;
            // report the clamped per-distribution value, free of the slice
            // sums' rounding
            let report = super::evaluate_bounds(ch, &distribution)?;
            let rate = match mode {
                CfMode::MinForm => report
                    .projected_message_bound
                    .min(report.projected_sum_bound),
                CfMode::Constrained => report.message_bound,
            };
            Ok(CfResult {
                rate,
                distribution,
                input_pairs: pairs.len(),
            })
        }
        None => Ok(CfResult {
            rate: 0.0,
            distribution: CodingDistribution::constant_quantizer(
                vec![1.0 / n1 as f64; n1],
                vec![1.0 / n2 as f64; n2],
                ch.alph_y2,
            )?,
            input_pairs: pairs.len(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::{axis, build_joint, evaluate_bounds};

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn a(n: usize) -> Alphabet {
        Alphabet::new(n).unwrap()
    }

    fn random_pmf(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 0.01).collect();
        let s: f64 = raw.iter().sum();
        let mut p: Vec<f64> = raw.iter().map(|x| x / s).collect();
        let head: f64 = p[..n - 1].iter().sum();
        p[n - 1] = 1.0 - head;
        p
    }

    fn random_channel(
        rng: &mut ChaCha8Rng,
        n1: usize,
        n2: usize,
        ny2: usize,
        ny3: usize,
    ) -> RelayChannelSpec {
        let kernel = (0..n1 * n2)
            .flat_map(|_| random_pmf(rng, ny2 * ny3))
            .collect();
        RelayChannelSpec::new(a(n1), a(n2), a(ny2), a(ny3), kernel).unwrap()
    }

    #[test]
    fn simplex_grid_is_lexicographic_and_complete() {
        let g = simplex_grid(3, 2);
        assert_eq!(
            g,
            vec![
                vec![0, 0, 2],
                vec![0, 1, 1],
                vec![0, 2, 0],
                vec![1, 0, 1],
                vec![1, 1, 0],
                vec![2, 0, 0]
            ]
        );
        assert_eq!(simplex_grid(3, 8).len() as u128, binomial(10, 2));
    }

    #[test]
    fn slice_terms_match_generic_information_measures() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let ch = random_channel(&mut rng, 2, 3, 2, 3);
            let p1 = random_pmf(&mut rng, 2);
            let p2 = random_pmf(&mut rng, 3);
            let res = 4;
            let cols = Columns::new(3, res);
            let choices: Vec<Vec<usize>> = (0..3)
                .map(|_| (0..2).map(|_| rng.gen_range(0..cols.len())).collect())
                .collect();
            let q: Vec<f64> = choices
                .iter()
                .flatten()
                .flat_map(|&c| cols.probs[c].clone())
                .collect();
            let d = CodingDistribution::new(p1.clone(), p2.clone(), a(2), a(3), q).unwrap();

            let law = InputLaw::new(&ch, &p1, &p2);
            let mut scratch = Vec::new();
            let (mut t1, mut t2, mut t3) = (0.0, 0.0, 0.0);
            for (x2, choice) in choices.iter().enumerate() {
                let (a1, a2, a3) = law.slice_terms(x2, &cols, choice, &mut scratch);
                t1 += a1;
                t2 += a2;
                t3 += a3;
            }
            let r = evaluate_bounds(&ch, &d).unwrap();
            let j = build_joint(&ch, &d).unwrap();
            let constraint = j
                .mutual_information(&[axis::YHAT], &[axis::Y2], &[axis::X2, axis::Y3])
                .unwrap();
            assert!((law.c_message + t1 - t2 - r.projected_message_bound).abs() < 1e-10);
            let raw_sum = r.relay_link + r.direct_rate - r.excess_quantization;
            assert!((law.c_sum + t3 - t2 - raw_sum).abs() < 1e-10);
            let h_x2y3 = j.entropy(&[axis::X2, axis::Y3]).unwrap();
            assert!((t1 - t3 - h_x2y3 - constraint).abs() < 1e-10);
        }
    }

    /// Exhaustive enumeration through the generic bound evaluation.
    fn brute_force(ch: &RelayChannelSpec, cfg: &SearchConfig, mode: CfMode) -> f64 {
        let res = cfg.grid_resolution;
        let cols = Columns::new(cfg.yhat_max_size, res);
        let ncols_q = ch.alph_x2.size() * ch.alph_y2.size();
        let mut best = f64::NEG_INFINITY;
        for g1 in simplex_grid(ch.alph_x1.size(), res) {
            for g2 in simplex_grid(ch.alph_x2.size(), res) {
                for idx in 0..cols.len().pow(ncols_q as u32) {
                    let mut choice = vec![0; ncols_q];
                    decode_choice(idx, ncols_q, cols.len(), &mut choice);
                    let q = choice.iter().flat_map(|&c| cols.probs[c].clone()).collect();
                    let d = CodingDistribution::new(
                        to_probs(&g1, res),
                        to_probs(&g2, res),
                        ch.alph_y2,
                        a(cfg.yhat_max_size),
                        q,
                    )
                    .unwrap();
                    if !cfg.include_degenerate && d.is_degenerate() {
                        continue;
                    }
                    let r = evaluate_bounds(ch, &d).unwrap();
                    let value = match mode {
                        CfMode::MinForm => r
                            .projected_message_bound
                            .min(r.relay_link + r.direct_rate - r.excess_quantization),
                        CfMode::Constrained => {
                            let j = build_joint(ch, &d).unwrap();
                            let c = j
                                .mutual_information(
                                    &[axis::YHAT],
                                    &[axis::Y2],
                                    &[axis::X2, axis::Y3],
                                )
                                .unwrap();
                            if c <= r.relay_link + 1e-12 {
                                r.message_bound
                            } else {
                                f64::NEG_INFINITY
                            }
                        }
                    };
                    best = best.max(value);
                }
            }
        }
        best.max(0.0)
    }

    #[test]
    fn pruned_search_matches_exhaustive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..4 {
            let ch = random_channel(&mut rng, 2, 2, 2, 2);
            for include_degenerate in [true, false] {
                let cfg = SearchConfig {
                    grid_resolution: 2,
                    yhat_max_size: 2,
                    include_degenerate,
                };
                for mode in [CfMode::MinForm, CfMode::Constrained] {
                    let fast = cf_rate(&ch, &cfg, mode).unwrap();
                    let slow = brute_force(&ch, &cfg, mode);
                    assert!(
                        (fast.rate - slow).abs() < 1e-10,
                        "trial {trial} {mode:?} degenerate={include_degenerate}: {} vs {slow}",
                        fast.rate
                    );
                    if !include_degenerate && fast.rate > 0.0 {
                        assert!(!fast.distribution.is_degenerate());
                    }
                }
            }
        }
    }

    #[test]
    fn argmax_distribution_attains_reported_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ch = random_channel(&mut rng, 2, 2, 2, 3);
        let cfg = SearchConfig::for_channel(&ch, 4);
        let res = cf_rate(&ch, &cfg, CfMode::MinForm).unwrap();
        let r = evaluate_bounds(&ch, &res.distribution).unwrap();
        let raw = r
            .projected_message_bound
            .min(r.relay_link + r.direct_rate - r.excess_quantization);
        assert!((raw - res.rate).abs() < 1e-10);
        assert_eq!(res.distribution.alph_yhat.size(), 3);
    }

    #[test]
    fn search_is_monotone_under_grid_refinement() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ch = random_channel(&mut rng, 2, 2, 2, 2);
        for mode in [CfMode::MinForm, CfMode::Constrained] {
            let coarse = cf_rate(
                &ch,
                &SearchConfig {
                    grid_resolution: 2,
                    yhat_max_size: 2,
                    include_degenerate: true,
                },
                mode,
            )
            .unwrap();
            let fine = cf_rate(
                &ch,
                &SearchConfig {
                    grid_resolution: 4,
                    yhat_max_size: 2,
                    include_degenerate: true,
                },
                mode,
            )
            .unwrap();
            let wider = cf_rate(
                &ch,
                &SearchConfig {
                    grid_resolution: 2,
                    yhat_max_size: 3,
                    include_degenerate: true,
                },
                mode,
            )
            .unwrap();
            assert!(fine.rate >= coarse.rate - 1e-12);
            assert!(wider.rate >= coarse.rate - 1e-12);
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ch = random_channel(&mut rng, 2, 2, 2, 2);
        let bad = SearchConfig {
            grid_resolution: 1,
            yhat_max_size: 2,
            include_degenerate: true,
        };
        assert!(matches!(
            cf_rate(&ch, &bad, CfMode::MinForm),
            Err(Error::InvalidSearch(_))
        ));
        let huge = SearchConfig {
            grid_resolution: 64,
            yhat_max_size: 8,
            include_degenerate: true,
        };
        assert!(matches!(
            cf_rate(&ch, &huge, CfMode::MinForm),
            Err(Error::SearchTooLarge { .. })
        ));
    }
}
