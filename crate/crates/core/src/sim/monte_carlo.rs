use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::region::{CodingDistribution, RelayChannelSpec};

use super::{Decoded, DecoderKind, Protocol, SimParams, TransmissionTrace};

/// Error events of one trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    /// Block where the first wrong sub-message occurred, in decoding order
    /// (ascending for sliding and exhaustive decoding, descending for
    /// backward decoding).
    pub first_error_block: Option<usize>,
    pub quantization_failures: usize,
    pub index_errors: usize,
}

impl TrialOutcome {
    pub fn score(decoder: DecoderKind, trace: &TransmissionTrace, decoded: &Decoded) -> Self {
        let blocks = decoded.w.len();
        let wrong = |b: &usize| decoded.w[*b] != trace.w[*b];
        let first_error_block = match decoder {
            DecoderKind::Backward => (0..blocks).rev().find(wrong),
            _ => (0..blocks).find(wrong),
        };
        Self {
            first_error_block,
            quantization_failures: trace.quantization_failed.iter().filter(|&&f| f).count(),
            index_errors: decoded
                .v
                .iter()
                .zip(&trace.v[1..])
                .filter(|(a, b)| a != b)
                .count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub trials: usize,
    /// Fraction of trials with any wrong sub-message.
    pub message_error_rate: f64,
    /// Fraction of trials whose first wrong sub-message (in decoding order)
    /// was in each block; sums to `message_error_rate`.
    pub per_block_error: Vec<f64>,
    /// Fraction of relay quantization steps that found no codeword.
    pub quantization_failure_rate: f64,
    /// Fraction of decoded relay indices `v̂_1..v̂_B` that are wrong.
    pub index_error_rate: f64,
}

impl ErrorStats {
    pub fn from_outcomes(blocks: usize, outcomes: &[TrialOutcome]) -> Self {
        let trials = outcomes.len();
        let mut first = vec![0usize; blocks];
        let (mut failures, mut index_errors, mut errors) = (0usize, 0usize, 0usize);
        for o in outcomes {
            if let Some(b) = o.first_error_block {
                first[b] += 1;
                errors += 1;
            }
            failures += o.quantization_failures;
            index_errors += o.index_errors;
        }
        let t = trials as f64;
        let slots = (trials * blocks) as f64;
        Self {
            trials,
            message_error_rate: errors as f64 / t,
            per_block_error: first.iter().map(|&c| c as f64 / t).collect(),
            quantization_failure_rate: failures as f64 / slots,
            index_error_rate: index_errors as f64 / slots,
        }
    }

    /// Binomial standard error of `message_error_rate`.
    pub fn message_error_sigma(&self) -> f64 {
        let p = self.message_error_rate;
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Runs `trials` independent trials. Trial `t` is seeded by
/// `derive_seed(params.seed, t)` and outcomes are reduced in trial order, so
/// the result does not depend on the size of the rayon pool.
pub fn run_monte_carlo(
    ch: &RelayChannelSpec,
    d: &CodingDistribution,
    params: &SimParams,
    trials: usize,
) -> Result<ErrorStats> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be positive".into()));
    }
    let proto = Protocol::new(ch, d, params)?;
    let outcomes = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let (trace, decoded) = proto.run_trial(t)?;
            Ok(TrialOutcome::score(params.decoder, &trace, &decoded))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorStats::from_outcomes(params.blocks, &outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::Alphabet;
    use crate::sim::Metric;
    use crate::zoo::{implicit_hashing_census, make_channel, ChannelRecipe};

    fn params(n: usize, rate: f64, r2: f64, decoder: DecoderKind) -> SimParams {
        SimParams {
            n,
            blocks: 3,
            rate,
            r2,
            epsilon: 0.3,
            seed: 7,
            decoder,
            metric: Metric::MaxScore,
            last_block_multiplier: 1,
        }
    }

    fn uniform_identity() -> CodingDistribution {
        CodingDistribution::identity_quantizer(
            vec![0.5, 0.5],
            vec![0.5, 0.5],
            Alphabet::new(2).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn noiseless_channel_has_no_errors() {
        let ch = make_channel(&ChannelRecipe::OrthogonalBsc { p2: 0.0, p3: 0.0 }).unwrap();
        // a constant quantizer leaves the direct link, which is noiseless here
        let d = CodingDistribution::constant_quantizer(
            vec![0.5, 0.5],
            vec![0.5, 0.5],
            Alphabet::new(2).unwrap(),
        )
        .unwrap();
        // strict typicality rejects the true tuple whenever its random joint
        // type drifts, which is common at n = 16; the exact fixtures in the
        // protocol tests cover that metric
        for decoder in [
            DecoderKind::Sliding,
            DecoderKind::Backward,
            DecoderKind::JointOracle,
        ] {
            // 16 words, 16 indices, three blocks: (16 · 16)^3 = 2^24 tuples
            let p = params(16, 0.25, 0.25, decoder);
            let stats = run_monte_carlo(&ch, &d, &p, 20).unwrap();
            assert_eq!(stats.message_error_rate, 0.0, "{decoder:?} {stats:?}");
            assert_eq!(stats.quantization_failure_rate, 0.0);
        }
    }

    #[test]
    fn useless_channel_is_blind_guessing() {
        // Y3 carries nothing: p3 = 0.5 kills the direct link and |X2| = 1
        let ch = make_channel(&ChannelRecipe::Primitive { p3: 0.5, r0: 0.0 }).unwrap();
        let d = CodingDistribution::identity_quantizer(
            vec![0.5, 0.5],
            vec![1.0],
            Alphabet::new(2).unwrap(),
        )
        .unwrap();
        let p = params(8, 0.5, 0.25, DecoderKind::Sliding);
        let stats = run_monte_carlo(&ch, &d, &p, 100).unwrap();
        // guessing three of 16 words each: P(all right) = 16^-3
        assert!(stats.message_error_rate >= 0.95, "{stats:?}");
    }

    #[test]
    fn stats_are_consistent_and_deterministic() {
        let ch = make_channel(&ChannelRecipe::OrthogonalBsc { p2: 0.05, p3: 0.2 }).unwrap();
        let p = params(12, 0.3, 0.3, DecoderKind::Sliding);
        let a = run_monte_carlo(&ch, &uniform_identity(), &p, 40).unwrap();
        let b = run_monte_carlo(&ch, &uniform_identity(), &p, 40).unwrap();
        assert_eq!(a, b);
        let sum: f64 = a.per_block_error.iter().sum();
        assert!((sum - a.message_error_rate).abs() < 1e-12);
        for r in [
            a.message_error_rate,
            a.quantization_failure_rate,
            a.index_error_rate,
        ] {
            assert!((0.0..=1.0).contains(&r));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let c = pool.install(|| run_monte_carlo(&ch, &uniform_identity(), &p, 40).unwrap());
        assert_eq!(a, c);
    }

    #[test]
    fn first_error_attribution_follows_decoding_order() {
        let trace = TransmissionTrace {
            w: vec![1, 2, 3, 0],
            v: vec![0, 1, 1, 1],
            y2: vec![],
            y3: vec![],
            quantization_failed: vec![false, true, false],
        };
        let dec = Decoded {
            w: vec![1, 0, 0],
            v: vec![1, 0, 1],
        };
        let s = TrialOutcome::score(DecoderKind::Sliding, &trace, &dec);
        assert_eq!(s.first_error_block, Some(1));
        assert_eq!(s.quantization_failures, 1);
        assert_eq!(s.index_errors, 1);
        assert_eq!(
            TrialOutcome::score(DecoderKind::Backward, &trace, &dec).first_error_block,
            Some(2)
        );
    }

    #[test]
    fn zero_trials_rejected() {
        let ch = make_channel(&ChannelRecipe::Deterministic).unwrap();
        let d = uniform_identity();
        assert!(run_monte_carlo(&ch, &d, &params(4, 0.5, 0.5, DecoderKind::Sliding), 0).is_err());
    }

    #[test]
    fn primitive_relay_codebook_is_implicitly_hashed() {
        let ch = make_channel(&ChannelRecipe::Primitive { p3: 0.1, r0: 1.0 }).unwrap();
        let d = CodingDistribution::identity_quantizer(
            vec![0.5, 0.5],
            vec![0.5, 0.5],
            Alphabet::new(2).unwrap(),
        )
        .unwrap();
        let mut p = params(4, 0.25, 2.0, DecoderKind::Sliding);
        p.blocks = 1;
        let books = crate::sim::generate_codebooks(&ch, &d, &p).unwrap();
        let (distinct, indices) = implicit_hashing_census(&books, 1).unwrap();
        assert_eq!(indices, 256);
        assert!(distinct <= 16);
        assert!(implicit_hashing_census(&books, 0).is_err());
        assert!(implicit_hashing_census(&books, 3).is_err());
    }
}
