use std::borrow::Cow;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::region::{CodingDistribution, RelayChannelSpec};

use super::{derive_seed, SimParams, Symbol};

/// Largest number of codewords in any single codebook.
pub const MAX_CODEBOOK_WORDS: u128 = 1 << 20;
/// Largest number of symbols materialized for one block's message or relay
/// codebook.
pub const MAX_CODEBOOK_SYMBOLS: u128 = 1 << 28;

enum YhatSource {
    /// Codeword `(v, u)` is drawn from its own stream
    /// `derive_seed(seed, v * K + u)`, so any codeword can be produced
    /// without materializing the `K × K` book.
    Generated { seed: u64 },
    /// Row-major `[v][u][i]`.
    Explicit(Vec<Symbol>),
}

/// Codebooks of one transmission block.
pub struct BlockBook {
    len: usize,
    words: usize,
    indices: usize,
    /// `[w][i]`
    x1: Vec<Symbol>,
    /// `[v][i]`
    x2: Vec<Symbol>,
    yhat: YhatSource,
}

impl BlockBook {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of message codewords.
    pub fn word_count(&self) -> usize {
        self.words
    }

    /// Number of relay indices (and of quantization codewords per index).
    pub fn index_count(&self) -> usize {
        self.indices
    }

    pub fn x1(&self, w: usize) -> &[Symbol] {
        &self.x1[w * self.len..(w + 1) * self.len]
    }

    pub fn x2(&self, v: usize) -> &[Symbol] {
        &self.x2[v * self.len..(v + 1) * self.len]
    }
}

/// Independent random codebooks for each of the `B + 1` blocks.
pub struct CodebookSet {
    books: Vec<BlockBook>,
    /// `P(ŷ | x2)` samplers, indexed by `x2`.
    yhat_law: Vec<WeightedIndex<f64>>,
}

/// Number of codewords for `bits` bits per block: `⌈2^bits⌉`.
pub fn codebook_size(bits: f64) -> u128 {
    if bits <= 0.0 {
        return 1;
    }
    if bits >= 126.0 {
        return u128::MAX;
    }
    let raw = bits.exp2();
    // shave rounding noise so 2^3.0000000001 stays 8
    (raw * (1.0 - 1e-12)).ceil().max(1.0) as u128
}

fn sampler(probs: &[f64]) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(probs).map_err(|e| Error::InvalidDistribution(e.to_string()))
}

fn draw_book(
    rng: &mut ChaCha8Rng,
    law: &WeightedIndex<f64>,
    count: usize,
    len: usize,
) -> Vec<Symbol> {
    (0..count * len)
        .map(|_| law.sample(rng) as Symbol)
        .collect()
}

fn check_size(what: &'static str, size: u128, limit: u128) -> Result<()> {
    if size > limit {
        return Err(Error::CodebookTooLarge { what, size, limit });
    }
    Ok(())
}

impl CodebookSet {
    /// Draws every block's books from `seed`. Message codewords are i.i.d.
    /// `P_X1`, relay codewords i.i.d. `P_X2`, and quantization codeword
    /// `(v, u)` is drawn symbol by symbol from `P(ŷ | x2_i(v))`.
    pub fn generate(
        ch: &RelayChannelSpec,
        d: &CodingDistribution,
        params: &SimParams,
        seed: u64,
    ) -> Result<Self> {
        params.validate()?;
        d.check_compatible(ch)?;
        let words = params.message_words()?;
        let indices = params.index_words()?;
        let p_x1 = sampler(&d.p_x1)?;
        let p_x2 = sampler(&d.p_x2)?;
        let yhat_law = d
            .yhat_given_x2(ch)
            .iter()
            .map(|p| sampler(p))
            .collect::<Result<Vec<_>>>()?;

        let books = (0..=params.blocks)
            .map(|b| {
                let len = params.block_len(b);
                check_size(
                    "message codebook",
                    (words * len) as u128,
                    MAX_CODEBOOK_SYMBOLS,
                )?;
                check_size(
                    "relay codebook",
                    (indices * len) as u128,
                    MAX_CODEBOOK_SYMBOLS,
                )?;
                let b = b as u64;
                let mut rng1 = ChaCha8Rng::seed_from_u64(derive_seed(seed, 3 * b));
                let mut rng2 = ChaCha8Rng::seed_from_u64(derive_seed(seed, 3 * b + 1));
                Ok(BlockBook {
                    len,
                    words,
                    indices,
                    x1: draw_book(&mut rng1, &p_x1, words, len),
                    x2: draw_book(&mut rng2, &p_x2, indices, len),
                    yhat: YhatSource::Generated {
                        seed: derive_seed(seed, 3 * b + 2),
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { books, yhat_law })
    }

    /// Hand-built books, mainly for constructing decoder fixtures. Each block
    /// is `(x1[w], x2[v], yhat[v][u])`; all sequences in a block share one
    /// length.
    pub fn from_explicit(blocks: Vec<ExplicitBlock>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidParams(
                "at least one block is required".into(),
            ));
        }
        let words = blocks[0].x1.len();
        let indices = blocks[0].x2.len();
        let books = blocks
            .into_iter()
            .enumerate()
            .map(|(b, blk)| {
                let len = blk.x1.first().map_or(0, Vec::len);
                let shape_ok = blk.x1.len() == words
                    && blk.x2.len() == indices
                    && blk.yhat.len() == indices
                    && blk.yhat.iter().all(|row| row.len() == indices)
                    && len > 0
                    && blk
                        .x1
                        .iter()
                        .chain(&blk.x2)
                        .chain(blk.yhat.iter().flatten())
                        .all(|s| s.len() == len);
                if !shape_ok {
                    return Err(Error::InvalidParams(format!(
                        "block {} has inconsistent shapes",
                        b + 1
                    )));
                }
                Ok(BlockBook {
                    len,
                    words,
                    indices,
                    x1: blk.x1.concat(),
                    x2: blk.x2.concat(),
                    yhat: YhatSource::Explicit(blk.yhat.into_iter().flatten().flatten().collect()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if words == 0 || indices == 0 {
            return Err(Error::InvalidParams(
                "codebooks need at least one word".into(),
            ));
        }
        Ok(Self {
            books,
            yhat_law: Vec::new(),
        })
    }

    /// Number of blocks, `B + 1`.
    pub fn blocks(&self) -> usize {
        self.books.len()
    }

    /// Block by 0-based position.
    pub fn block(&self, b: usize) -> &BlockBook {
        &self.books[b]
    }

    /// Quantization codeword `ŷ_b(v, u)`, `b` 0-based.
    pub fn yhat(&self, b: usize, v: usize, u: usize) -> Cow<'_, [Symbol]> {
        let book = &self.books[b];
        match &book.yhat {
            YhatSource::Explicit(all) => {
                let start = (v * book.indices + u) * book.len;
                Cow::Borrowed(&all[start..start + book.len])
            }
            YhatSource::Generated { seed } => {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(derive_seed(*seed, (v * book.indices + u) as u64));
                Cow::Owned(
                    book.x2(v)
                        .iter()
                        .map(|&x2| self.yhat_law[x2 as usize].sample(&mut rng) as Symbol)
                        .collect(),
                )
            }
        }
    }
}

/// Input to [`CodebookSet::from_explicit`].
#[derive(Debug, Clone, Default)]
pub struct ExplicitBlock {
    pub x1: Vec<Vec<Symbol>>,
    pub x2: Vec<Vec<Symbol>>,
    pub yhat: Vec<Vec<Vec<Symbol>>>,
}

/// Draws the codebooks for `params` from `params.seed`.
pub fn generate_codebooks(
    ch: &RelayChannelSpec,
    d: &CodingDistribution,
    params: &SimParams,
) -> Result<CodebookSet> {
    CodebookSet::generate(ch, d, params, params.seed)
}

/// Splits `w` into `blocks` big-endian base-`words` digits.
pub fn split_message(w: u128, words: usize, blocks: usize) -> Result<Vec<usize>> {
    let radix = words as u128;
    let limit = (0..blocks).try_fold(1u128, |acc, _| acc.checked_mul(radix));
    if limit.is_some_and(|l| w >= l) {
        return Err(Error::MessageOutOfRange { w, blocks, words });
    }
    let mut digits = vec![0usize; blocks];
    let mut rest = w;
    for d in digits.iter_mut().rev() {
        *d = (rest % radix) as usize;
        rest /= radix;
    }
    Ok(digits)
}

/// Inverse of [`split_message`].
pub fn join_message(digits: &[usize], words: usize) -> u128 {
    digits
        .iter()
        .fold(0u128, |acc, &d| acc * words as u128 + d as u128)
}

/// Per-block source transmissions for message `w`: `x1_b(w_b)` for the `B`
/// message blocks and the first codeword in the final block.
pub fn source_encode(w: u128, books: &CodebookSet) -> Result<Vec<&[Symbol]>> {
    let blocks = books.blocks() - 1;
    let words = books.block(0).word_count();
    let mut sub = split_message(w, words, blocks)?;
    sub.push(0);
    Ok(sub
        .iter()
        .enumerate()
        .map(|(b, &wb)| books.block(b).x1(wb))
        .collect())
}
