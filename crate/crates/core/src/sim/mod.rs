//! Monte Carlo simulation of the short-message quantize-forward protocol.
//!
//! A message is sent over `B + 1` blocks of `n` channel uses. In block `b`
//! the source sends `x1_b(w_b)` (the first codeword in the last block), the
//! relay sends `x2_b(v_b)` with `v_1` fixed, and after the block the relay
//! looks for a quantization codeword `ŷ_b(v_b, u)` that matches what it
//! heard; the match becomes `v_{b+1}`. The sink recovers `(w_b, v_{b+1})`
//! with a sliding window over two blocks, backwards from the last block, or
//! by exhaustive search over whole index tuples.
//!
//! Indices are 0-based throughout: index 0 is the first codeword, which is
//! also what every "nothing matched" fallback returns.
//!
//! # Seeding
//!
//! Every random stream is derived from the run seed with [`derive_seed`], a
//! SplitMix64 finalizer applied to `seed ^ splitmix64(stream)`. Trial `t`
//! uses `derive_seed(seed, t)`; inside a trial, stream 0 feeds the
//! codebooks, 1 the messages and 2 the channel. Codebook block `b` (0-based)
//! draws `x1` from stream `3b`, `x2` from `3b + 1`, and quantization
//! codeword `(v, u)` from `derive_seed(derive_seed(book_seed, 3b + 2), v·K + u)`.
//! Results therefore do not depend on how trials are scheduled.

mod codebook;
mod metric;
mod monte_carlo;
mod protocol;

pub use codebook::{
    codebook_size, generate_codebooks, join_message, source_encode, split_message, BlockBook,
    CodebookSet, ExplicitBlock, MAX_CODEBOOK_SYMBOLS, MAX_CODEBOOK_WORDS,
};
pub use monte_carlo::{run_monte_carlo, ErrorStats, TrialOutcome};
pub use protocol::{Decoded, Protocol, TransmissionTrace, MAX_JOINT_TUPLES, MAX_WINDOW_CANDIDATES};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Symbol = u16;

/// Index returned whenever no candidate passes.
pub const FALLBACK_INDEX: usize = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderKind {
    Sliding,
    Backward,
    JointOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// First candidate (in index order) that is robustly typical.
    Typicality,
    /// Candidate with the largest information density.
    MaxScore,
}

impl DecoderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Sliding => "sliding",
            Self::Backward => "backward",
            Self::JointOracle => "joint_oracle",
        }
    }
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Typicality => "typicality",
            Self::MaxScore => "max_score",
        }
    }
}

impl std::str::FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sliding" => Ok(Self::Sliding),
            "backward" => Ok(Self::Backward),
            "joint_oracle" => Ok(Self::JointOracle),
            other => Err(Error::InvalidParams(format!("unknown decoder `{other}`"))),
        }
    }
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimParams {
    /// Channel uses per block.
    pub n: usize,
    /// Message blocks; `blocks + 1` blocks are transmitted.
    pub blocks: usize,
    /// Message rate in bits per use; `⌈2^(n·rate)⌉` codewords per block.
    pub rate: f64,
    /// Relay index rate in bits per use; `⌈2^(n·r2)⌉` indices.
    pub r2: f64,
    pub epsilon: f64,
    #[serde(default)]
    pub seed: u64,
    pub decoder: DecoderKind,
    pub metric: Metric,
    /// Length of the final block in units of `n`.
    #[serde(default = "one")]
    pub last_block_multiplier: usize,
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.blocks == 0 {
            return bad("blocks must be positive".into());
        }
        if !(self.rate.is_finite() && self.rate >= 0.0) {
            return bad(format!("rate = {} must be a nonnegative number", self.rate));
        }
        if !(self.r2.is_finite() && self.r2 >= 0.0) {
            return bad(format!("r2 = {} must be a nonnegative number", self.r2));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidEpsilon(self.epsilon));
        }
        if self.last_block_multiplier == 0 {
            return bad("last_block_multiplier must be positive".into());
        }
        self.message_words()?;
        self.index_words()?;
        Ok(())
    }

    fn words(what: &'static str, bits: f64) -> Result<usize> {
        let size = codebook_size(bits);
        if size > MAX_CODEBOOK_WORDS {
            return Err(Error::CodebookTooLarge {
                what,
                size,
                limit: MAX_CODEBOOK_WORDS,
            });
        }
        Ok(size as usize)
    }

    /// `⌈2^(n·rate)⌉`.
    pub fn message_words(&self) -> Result<usize> {
        Self::words("message codebook", self.n as f64 * self.rate)
    }

    /// `⌈2^(n·r2)⌉`.
    pub fn index_words(&self) -> Result<usize> {
        Self::words("relay codebook", self.n as f64 * self.r2)
    }

    /// `log2(codewords) / n`, the rate actually simulated.
    pub fn effective_rate(&self) -> Result<f64> {
        Ok((self.message_words()? as f64).log2() / self.n as f64)
    }

    pub fn effective_r2(&self) -> Result<f64> {
        Ok((self.index_words()? as f64).log2() / self.n as f64)
    }

    /// Length of 0-based block `b`.
    pub fn block_len(&self, b: usize) -> usize {
        if b == self.blocks {
            self.n * self.last_block_multiplier
        } else {
            self.n
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of sub-stream `stream` of `seed`. Fixed forever: changing it changes
/// every recorded result.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_are_stable() {
        // pinned: output files depend on these values
        assert_eq!(splitmix64(0), 0xe220_a839_7b1d_cdaf);
        assert_eq!(derive_seed(0, 0), splitmix64(splitmix64(0)));
        assert_ne!(derive_seed(1, 0), derive_seed(0, 1));
    }

    #[test]
    fn params_validation() {
        let p = SimParams {
            n: 8,
            blocks: 2,
            rate: 0.25,
            r2: 0.5,
            epsilon: 0.2,
            seed: 0,
            decoder: DecoderKind::Sliding,
            metric: Metric::Typicality,
            last_block_multiplier: 1,
        };
        assert!(p.validate().is_ok());
        assert_eq!(p.message_words().unwrap(), 4);
        assert_eq!(p.index_words().unwrap(), 16);
        assert_eq!(p.effective_rate().unwrap(), 0.25);
        assert!(SimParams { n: 0, ..p.clone() }.validate().is_err());
        assert!(SimParams {
            blocks: 0,
            ..p.clone()
        }
        .validate()
        .is_err());
        assert!(SimParams {
            epsilon: 1.0,
            ..p.clone()
        }
        .validate()
        .is_err());
        assert!(SimParams {
            rate: -0.1,
            ..p.clone()
        }
        .validate()
        .is_err());
        // 2^(3 * 0.4) = 2.30 -> 3 words, effective rate log2(3)/3
        let q = SimParams {
            n: 3,
            rate: 0.4,
            ..p
        };
        assert_eq!(q.message_words().unwrap(), 3);
        assert!((q.effective_rate().unwrap() - 3f64.log2() / 3.0).abs() < 1e-15);
    }

    #[test]
    fn params_json_defaults() {
        let p: SimParams = serde_json::from_str(
            r#"{"n":16,"blocks":4,"rate":0.25,"r2":0.5,"epsilon":0.3,"decoder":"backward","metric":"max_score"}"#,
        )
        .unwrap();
        assert_eq!(p.seed, 0);
        assert_eq!(p.last_block_multiplier, 1);
        assert_eq!(p.decoder, DecoderKind::Backward);
    }
}
