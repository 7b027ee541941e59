use rand::distributions::{Distribution, Uniform, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::region::{axis, build_joint, CodingDistribution, RelayChannelSpec};

use super::metric::CellLaw;
use super::{derive_seed, CodebookSet, DecoderKind, Metric, SimParams, Symbol, FALLBACK_INDEX};

/// Largest `words × indices` candidate set a streaming decoder searches per
/// block.
pub const MAX_WINDOW_CANDIDATES: u128 = 1 << 24;
/// Largest `words^B × indices^B` tuple space for the exhaustive decoder.
pub const MAX_JOINT_TUPLES: u128 = 1 << 24;

const MAX_SYMBOLS: usize = Symbol::MAX as usize + 1;

/// Everything that happened on the air in one transmission.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionTrace {
    /// `w_0..w_B`; the last entry is the fixed final-block index 0.
    pub w: Vec<usize>,
    /// `v_0..v_B`; `v_0 = 0`.
    pub v: Vec<usize>,
    pub y2: Vec<Vec<Symbol>>,
    pub y3: Vec<Vec<Symbol>>,
    /// One flag per relay quantization step (after blocks `0..B`).
    pub quantization_failed: Vec<bool>,
}

/// Sink output: `ŵ_0..ŵ_{B-1}` and `v̂_1..v̂_B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub w: Vec<usize>,
    pub v: Vec<usize>,
}

/// One candidate statistic with a deterministic "first best wins" rule.
#[derive(Clone, Copy)]
struct Best {
    score: f64,
    w: usize,
    v: usize,
}

impl Best {
    fn none() -> Self {
        Self {
            score: f64::NEG_INFINITY,
            w: FALLBACK_INDEX,
            v: FALLBACK_INDEX,
        }
    }

    /// Keeps the higher score; on equal scores the lexicographically smaller
    /// `(w, v)`.
    fn offer(&mut self, score: f64, w: usize, v: usize) {
        if score == f64::NEG_INFINITY {
            return;
        }
        if score > self.score || (score == self.score && (w, v) < (self.w, self.v)) {
            *self = Self { score, w, v };
        }
    }

    fn found(&self) -> bool {
        self.score > f64::NEG_INFINITY
    }
}

/// A protocol instance: channel, coding distribution, parameters and the
/// decision laws derived from them. Shared read-only across trials.
pub struct Protocol {
    params: SimParams,
    channel: RelayChannelSpec,
    distribution: CodingDistribution,
    /// `(Ŷ, X2, Y2)` at the relay.
    relay_law: CellLaw,
    /// `(X2, Y3)`: relay index from the current block.
    index_law: CellLaw,
    /// `(X1, Ŷ, X2, Y3)`: message and quantization codeword.
    message_law: CellLaw,
    /// `(X1, X2, Y3)`: the final block, where no quantization codeword is
    /// ever referenced.
    final_law: CellLaw,
    /// Samplers of `(y2, y3)` per `(x1, x2)`.
    kernel_rows: Vec<WeightedIndex<f64>>,
}

impl Protocol {
    pub fn new(ch: &RelayChannelSpec, d: &CodingDistribution, params: &SimParams) -> Result<Self> {
        params.validate()?;
        d.check_compatible(ch)?;
        for (name, size) in [
            ("x1", ch.alph_x1.size()),
            ("x2", ch.alph_x2.size()),
            ("y2", ch.alph_y2.size()),
            ("y3", ch.alph_y3.size()),
            ("yhat", d.alph_yhat.size()),
        ] {
            if size > MAX_SYMBOLS {
                return Err(Error::InvalidParams(format!(
                    "alphabet `{name}` has {size} symbols; simulation supports at most {MAX_SYMBOLS}"
                )));
            }
        }
        let words = params.message_words()? as u128;
        let indices = params.index_words()? as u128;
        let window = words * indices;
        if window > MAX_WINDOW_CANDIDATES {
            return Err(Error::SearchSpaceTooLarge {
                size: window,
                limit: MAX_WINDOW_CANDIDATES,
            });
        }
        if params.decoder == DecoderKind::JointOracle {
            let size = (0..params.blocks).try_fold(1u128, |acc, _| acc.checked_mul(window));
            match size {
                Some(s) if s <= MAX_JOINT_TUPLES => {}
                _ => {
                    return Err(Error::SearchSpaceTooLarge {
                        size: size.unwrap_or(u128::MAX),
                        limit: MAX_JOINT_TUPLES,
                    })
                }
            }
        }

        use axis::{X1, X2, Y2, Y3, YHAT};
        let joint = build_joint(ch, d)?;
        let relay_law = CellLaw::new(&joint, &[YHAT, X2, Y2], &[&[YHAT, X2], &[Y2]])?;
        let index_law = CellLaw::new(&joint, &[X2, Y3], &[&[X2], &[Y3]])?;
        let message_law = CellLaw::new(&joint, &[X1, YHAT, X2, Y3], &[&[X1], &[YHAT, X2], &[Y3]])?;
        let final_law = CellLaw::new(&joint, &[X1, X2, Y3], &[&[X1], &[X2], &[Y3]])?;
        let kernel_rows = (0..ch.alph_x1.size())
            .flat_map(|x1| (0..ch.alph_x2.size()).map(move |x2| (x1, x2)))
            .map(|(x1, x2)| {
                WeightedIndex::new(ch.row(x1, x2))
                    .map_err(|e| Error::InvalidDistribution(e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params: params.clone(),
            channel: ch.clone(),
            distribution: d.clone(),
            relay_law,
            index_law,
            message_law,
            final_law,
            kernel_rows,
        })
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    fn metric(&self) -> Metric {
        self.params.metric
    }

    fn eps(&self) -> f64 {
        self.params.epsilon
    }

    fn check_books(&self, books: &CodebookSet) -> Result<()> {
        if books.blocks() != self.params.blocks + 1 {
            return Err(Error::InvalidParams(format!(
                "codebooks cover {} blocks, parameters need {}",
                books.blocks(),
                self.params.blocks + 1
            )));
        }
        Ok(())
    }

    /// Fresh random codebooks for one trial.
    pub fn codebooks(&self, seed: u64) -> Result<CodebookSet> {
        CodebookSet::generate(&self.channel, &self.distribution, &self.params, seed)
    }

    /// Relay rule after block `b` (0-based): search `u` for a quantization
    /// codeword `ŷ_b(v_b, u)` matching `(x2_b(v_b), y2)`. Returns the next
    /// index and whether the search failed, in which case the index is the
    /// fallback 0.
    ///
    /// Typicality takes the first typical `u`; max-score takes the best
    /// score, ties to the smaller `u`, and fails only when every candidate
    /// hits a zero-probability cell.
    pub fn relay_step(
        &self,
        books: &CodebookSet,
        b: usize,
        v_b: usize,
        y2: &[Symbol],
    ) -> (usize, bool) {
        let book = books.block(b);
        let base = self.relay_law.base(y2.len(), &[(1, book.x2(v_b)), (2, y2)]);
        let mut counts = Vec::new();
        let mut best = Best::none();
        for u in 0..book.index_count() {
            let yhat = books.yhat(b, v_b, u);
            let s = self.relay_law.evaluate(
                &base,
                &[(0, &yhat)],
                self.metric(),
                self.eps(),
                &mut counts,
            );
            best.offer(s, 0, u);
            if self.metric() == Metric::Typicality && best.found() {
                break;
            }
        }
        if best.found() {
            (best.v, false)
        } else {
            (FALLBACK_INDEX, true)
        }
    }

    /// Sends sub-messages `w_0..w_{B-1}` through the channel and the relay.
    pub fn transmit<R: Rng>(
        &self,
        books: &CodebookSet,
        messages: &[usize],
        rng: &mut R,
    ) -> Result<TransmissionTrace> {
        self.check_books(books)?;
        let last = self.params.blocks;
        if messages.len() != last {
            return Err(Error::InvalidParams(format!(
                "{} sub-messages for {last} blocks",
                messages.len()
            )));
        }
        let words = books.block(0).word_count();
        if let Some(&w) = messages.iter().find(|&&w| w >= words) {
            return Err(Error::MessageOutOfRange {
                w: w as u128,
                blocks: 1,
                words,
            });
        }
        let mut w = messages.to_vec();
        w.push(FALLBACK_INDEX);
        let mut v = vec![FALLBACK_INDEX];
        let (mut y2s, mut y3s, mut failed) = (Vec::new(), Vec::new(), Vec::new());
        let ny3 = self.channel.alph_y3.size();
        let nx2 = self.channel.alph_x2.size();
        for b in 0..=last {
            let book = books.block(b);
            let (x1, x2) = (book.x1(w[b]), book.x2(v[b]));
            let (mut y2, mut y3) = (
                Vec::with_capacity(book.len()),
                Vec::with_capacity(book.len()),
            );
            for (&a, &c) in x1.iter().zip(x2) {
                let cell = self.kernel_rows[a as usize * nx2 + c as usize].sample(rng);
                y2.push((cell / ny3) as Symbol);
                y3.push((cell % ny3) as Symbol);
            }
            if b < last {
                let (next, fail) = self.relay_step(books, b, v[b], &y2);
                v.push(next);
                failed.push(fail);
            }
            y2s.push(y2);
            y3s.push(y3);
        }
        Ok(TransmissionTrace {
            w,
            v,
            y2: y2s,
            y3: y3s,
            quantization_failed: failed,
        })
    }

    /// Runs the configured decoder on the sink's observations `y3_0..y3_B`.
    pub fn sink_decode(&self, books: &CodebookSet, y3: &[Vec<Symbol>]) -> Result<Decoded> {
        self.check_books(books)?;
        if y3.len() != books.blocks() {
            return Err(Error::InvalidParams(format!(
                "{} output blocks for {} codebooks",
                y3.len(),
                books.blocks()
            )));
        }
        for (b, y) in y3.iter().enumerate() {
            if y.len() != books.block(b).len() {
                return Err(Error::LengthMismatch {
                    first: books.block(b).len(),
                    other: y.len(),
                });
            }
        }
        Ok(match self.params.decoder {
            DecoderKind::Sliding => self.decode_sliding(books, y3),
            DecoderKind::Backward => self.decode_backward(books, y3),
            DecoderKind::JointOracle => self.decode_joint(books, y3),
        })
    }

    /// Statistic of `(x2_b(v), y3_b)`.
    fn index_stat(
        &self,
        books: &CodebookSet,
        b: usize,
        v: usize,
        y3: &[Symbol],
        counts: &mut Vec<u32>,
    ) -> f64 {
        let base = self.index_law.base(y3.len(), &[(1, y3)]);
        self.index_law.evaluate(
            &base,
            &[(0, books.block(b).x2(v))],
            self.metric(),
            self.eps(),
            counts,
        )
    }

    /// Offers every `w` for `(x1_b(w), ŷ_b(v, next), x2_b(v), y3_b)` into
    /// `best` as the pair `(w, tag)`, with `extra` added to every score.
    #[allow(clippy::too_many_arguments)]
    fn offer_messages(
        &self,
        books: &CodebookSet,
        b: usize,
        (v, next): (usize, usize),
        y3: &[Symbol],
        extra: f64,
        tag: usize,
        best: &mut Best,
        counts: &mut Vec<u32>,
    ) {
        let book = books.block(b);
        let yhat = books.yhat(b, v, next);
        let base = self
            .message_law
            .base(y3.len(), &[(1, &yhat), (2, book.x2(v)), (3, y3)]);
        for w in 0..book.word_count() {
            let s = self.message_law.evaluate(
                &base,
                &[(0, book.x1(w))],
                self.metric(),
                self.eps(),
                counts,
            );
            best.offer(s + extra, w, tag);
            if self.metric() == Metric::Typicality && s == 0.0 {
                // later w cannot be lexicographically smaller for this tag
                break;
            }
        }
    }

    /// Window `k = 1..=B` decodes `(ŵ_{k-1}, v̂_k)` from the index test on
    /// block `k` and the message test on block `k - 1` with `v̂_{k-1}` from
    /// the previous window.
    fn decode_sliding(&self, books: &CodebookSet, y3: &[Vec<Symbol>]) -> Decoded {
        let blocks = self.params.blocks;
        let mut counts = Vec::new();
        let mut prev = FALLBACK_INDEX;
        let (mut w_hat, mut v_hat) = (Vec::with_capacity(blocks), Vec::with_capacity(blocks));
        for k in 1..=blocks {
            let mut best = Best::none();
            for v in 0..books.block(k).index_count() {
                let s1 = self.index_stat(books, k, v, &y3[k], &mut counts);
                if s1 == f64::NEG_INFINITY {
                    continue;
                }
                self.offer_messages(
                    books,
                    k - 1,
                    (prev, v),
                    &y3[k - 1],
                    s1,
                    v,
                    &mut best,
                    &mut counts,
                );
            }
            w_hat.push(best.w);
            v_hat.push(best.v);
            prev = best.v;
        }
        Decoded { w: w_hat, v: v_hat }
    }

    /// `v̂_B` from the final block, then `(ŵ_b, v̂_b)` for `b = B-1..0` from
    /// block `b` alone given `v̂_{b+1}`. `v_0 = 0` is known.
    fn decode_backward(&self, books: &CodebookSet, y3: &[Vec<Symbol>]) -> Decoded {
        let blocks = self.params.blocks;
        let mut counts = Vec::new();
        let mut best = Best::none();
        for v in 0..books.block(blocks).index_count() {
            best.offer(self.final_stat(books, v, &y3[blocks], &mut counts), 0, v);
            if self.metric() == Metric::Typicality && best.found() {
                break;
            }
        }
        let mut v_hat = vec![FALLBACK_INDEX; blocks];
        let mut w_hat = vec![FALLBACK_INDEX; blocks];
        v_hat[blocks - 1] = best.v;
        for b in (0..blocks).rev() {
            let next = v_hat[b];
            let candidates = if b == 0 {
                1
            } else {
                books.block(b).index_count()
            };
            let mut best = Best::none();
            for v in 0..candidates {
                self.offer_messages(books, b, (v, next), &y3[b], 0.0, v, &mut best, &mut counts);
            }
            w_hat[b] = best.w;
            if b > 0 {
                v_hat[b - 1] = best.v;
            }
        }
        Decoded { w: w_hat, v: v_hat }
    }

    /// Statistic of `(x1_B(0), x2_B(v), y3_B)` on the final block.
    fn final_stat(
        &self,
        books: &CodebookSet,
        v: usize,
        y3: &[Symbol],
        counts: &mut Vec<u32>,
    ) -> f64 {
        let book = books.block(self.params.blocks);
        let base = self
            .final_law
            .base(y3.len(), &[(0, book.x1(FALLBACK_INDEX)), (2, y3)]);
        self.final_law
            .evaluate(&base, &[(1, book.x2(v))], self.metric(), self.eps(), counts)
    }

    /// Exhaustive search over every `(w_0..w_{B-1}, v_1..v_B)`. The total
    /// statistic is a sum of per-block terms, so for each relay index chain
    /// the best message of each block is independent of the others; chains
    /// are enumerated in lexicographic order and the first best total wins.
    fn decode_joint(&self, books: &CodebookSet, y3: &[Vec<Symbol>]) -> Decoded {
        let blocks = self.params.blocks;
        let k = books.block(0).index_count();
        let mut counts = Vec::new();
        // table[b][v_b * k + v_{b+1}] = best (score, w) on block b
        let table: Vec<Vec<Best>> = (0..blocks)
            .map(|b| {
                let froms = if b == 0 { 1 } else { k };
                let mut row = vec![Best::none(); froms * k];
                for from in 0..froms {
                    for to in 0..k {
                        let mut best = Best::none();
                        self.offer_messages(
                            books,
                            b,
                            (from, to),
                            &y3[b],
                            0.0,
                            to,
                            &mut best,
                            &mut counts,
                        );
                        row[from * k + to] = best;
                    }
                }
                row
            })
            .collect();
        let last: Vec<f64> = (0..k)
            .map(|v| self.final_stat(books, v, &y3[blocks], &mut counts))
            .collect();

        let mut chain = vec![0usize; blocks];
        let mut best_chain: Option<(f64, Vec<usize>)> = None;
        loop {
            let mut total = 0.0;
            let mut from = 0;
            for (b, &to) in chain.iter().enumerate() {
                total += table[b][from * k + to].score;
                from = to;
            }
            total += last[from];
            if total > f64::NEG_INFINITY && best_chain.as_ref().is_none_or(|(s, _)| total > *s) {
                best_chain = Some((total, chain.clone()));
                if self.metric() == Metric::Typicality {
                    break;
                }
            }
            // next chain in lexicographic order
            let mut i = blocks;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                chain[i] += 1;
                if chain[i] < k {
                    break;
                }
                chain[i] = 0;
            }
            if chain.iter().all(|&c| c == 0) {
                break;
            }
        }
        match best_chain {
            None => Decoded {
                w: vec![FALLBACK_INDEX; blocks],
                v: vec![FALLBACK_INDEX; blocks],
            },
            Some((_, chain)) => {
                let mut from = 0;
                let w = chain
                    .iter()
                    .enumerate()
                    .map(|(b, &to)| {
                        let w = table[b][from * k + to].w;
                        from = to;
                        w
                    })
                    .collect();
                Decoded { w, v: chain }
            }
        }
    }

    /// One complete trial with its own codebooks, messages and channel noise.
    pub fn run_trial(&self, trial: u64) -> Result<(TransmissionTrace, Decoded)> {
        let seed = derive_seed(self.params.seed, trial);
        let books = self.codebooks(derive_seed(seed, 0))?;
        let mut msg_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 1));
        let words = Uniform::from(0..books.block(0).word_count());
        let messages: Vec<usize> = (0..self.params.blocks)
            .map(|_| words.sample(&mut msg_rng))
            .collect();
        let mut ch_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 2));
        let trace = self.transmit(&books, &messages, &mut ch_rng)?;
        let decoded = self.sink_decode(&books, &trace.y3)?;
        Ok((trace, decoded))
    }
}
