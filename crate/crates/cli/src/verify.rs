//! `verify`: the self-check suite.
//!
//! Each check compares the library against an independent computation or a
//! property it must satisfy. The mutual-information routine is passed in so
//! the suite itself can be shown to catch a broken implementation.

use std::time::{Duration, Instant};

use anyhow::{ensure, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relaylab_core::sim::Metric;
use relaylab_core::zoo::{random_channel, random_distribution, random_simplex_point, Alphabets};
use relaylab_core::{
    cf_rate, evaluate_bounds, fme_oracle_check, implicit_hashing_census, make_channel,
    run_monte_carlo, Alphabet, CfMode, ChannelRecipe, CodingDistribution, DecoderKind, JointPmf,
    Protocol, SearchConfig, SimParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Level {
    Fast,
    Full,
}

/// Signature of [`JointPmf::mutual_information`], as a free function.
pub type MiFn = dyn Fn(&JointPmf, &[&str], &[&str], &[&str]) -> relaylab_core::Result<f64> + Sync;

pub fn library_mi(p: &JointPmf, a: &[&str], b: &[&str], c: &[&str]) -> relaylab_core::Result<f64> {
    p.mutual_information(a, b, c)
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CheckResult {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        format!(
            "{status} {:<24} {} ({:.1} s)",
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

const NAMES: [&str; 4] = ["A", "B", "C", "D"];

pub const MI_TOLERANCE: f64 = 1e-10;
pub const FME_GRID: usize = 10_000;
pub const CF_TOLERANCE: f64 = 0.01;

/// A random table over 2 to 4 axes of size 1 to 4, with some exact zeros.
pub fn random_pmf<R: Rng>(rng: &mut R) -> JointPmf {
    let axes = rng.gen_range(2..=4);
    let sizes: Vec<usize> = (0..axes).map(|_| rng.gen_range(1..=4)).collect();
    let mut probs = random_simplex_point(rng, sizes.iter().product());
    for p in probs.iter_mut() {
        if rng.gen_bool(0.2) {
            *p = 0.0;
        }
    }
    let sum: f64 = probs.iter().sum();
    if sum == 0.0 {
        probs[0] = 1.0;
    } else {
        probs.iter_mut().for_each(|p| *p /= sum);
    }
    JointPmf::new(
        NAMES
            .iter()
            .zip(&sizes)
            .map(|(n, &s)| (*n, Alphabet::new(s).unwrap())),
        probs,
    )
    .unwrap()
}

/// `I(A;B|C)` by direct summation over every cell, with each marginal
/// recomputed from the full table.
pub fn brute_force_mi(p: &JointPmf, a: &[usize], b: &[usize], c: &[usize]) -> f64 {
    let shape = p.shape();
    let cells: Vec<(Vec<usize>, f64)> = p
        .probs()
        .iter()
        .enumerate()
        .map(|(mut flat, &q)| {
            let mut sym = vec![0; shape.len()];
            for i in (0..shape.len()).rev() {
                sym[i] = flat % shape[i];
                flat /= shape[i];
            }
            (sym, q)
        })
        .collect();
    let marginal = |axes: &[usize], at: &[usize]| -> f64 {
        cells
            .iter()
            .filter(|(s, _)| axes.iter().all(|&i| s[i] == at[i]))
            .map(|(_, q)| q)
            .sum()
    };
    let abc: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
    let ac: Vec<usize> = a.iter().chain(c).copied().collect();
    let bc: Vec<usize> = b.iter().chain(c).copied().collect();
    let mut total = 0.0;
    let mut seen = Vec::new();
    for (s, _) in &cells {
        let key: Vec<usize> = abc.iter().map(|&i| s[i]).collect();
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        let pabc = marginal(&abc, s);
        if pabc > 0.0 {
            total += pabc * (pabc * marginal(c, s) / (marginal(&ac, s) * marginal(&bc, s))).log2();
        }
    }
    total.max(0.0)
}

fn check_mi(mi: &MiFn) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = random_pmf(&mut rng);
        let (mut a, mut b, mut c) = (vec![0], vec![1], vec![]);
        for i in 2..p.axes().len() {
            match rng.gen_range(0..3) {
                0 => a.push(i),
                1 => b.push(i),
                _ => c.push(i),
            }
        }
        let names = |ix: &[usize]| ix.iter().map(|&i| NAMES[i]).collect::<Vec<_>>();
        let got = mi(&p, &names(&a), &names(&b), &names(&c))?;
        worst = worst.max((got - brute_force_mi(&p, &a, &b, &c)).abs());
    }
    ensure!(
        worst <= MI_TOLERANCE,
        "max deviation {worst:.3e} over 100 tables exceeds {MI_TOLERANCE:e}"
    );
    Ok(format!("100 tables, max deviation {worst:.1e}"))
}

const BINARY: Alphabets = Alphabets {
    x1: 2,
    x2: 2,
    y2: 2,
    y3: 2,
};

fn check_fme() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let tol = 2.0 / FME_GRID as f64;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let ch = random_channel(&mut rng, BINARY)?;
        for _ in 0..5 {
            let d = random_distribution(&mut rng, &ch, 2)?;
            let (scan, closed) = fme_oracle_check(&ch, &d, FME_GRID)?;
            worst = worst.max((scan - closed).abs());
        }
    }
    ensure!(worst <= tol, "max gap {worst:.3e} exceeds {tol:e}");
    Ok(format!(
        "20 channels x 5 distributions, max gap {worst:.1e}"
    ))
}

/// The two channels on which both compress-forward forms are compared.
pub fn cf_channels() -> [ChannelRecipe; 2] {
    [
        ChannelRecipe::OrthogonalBsc { p2: 0.05, p3: 0.2 },
        ChannelRecipe::Primitive { p3: 0.1, r0: 1.0 },
    ]
}

/// `(label, minform, constrained)` per channel.
pub fn cf_pairs(cfg: SearchConfig) -> Result<Vec<(String, f64, f64)>> {
    cf_channels()
        .iter()
        .map(|r| {
            let ch = make_channel(r)?;
            let a = cf_rate(&ch, &cfg, CfMode::MinForm)?.rate;
            let b = cf_rate(&ch, &cfg, CfMode::Constrained)?.rate;
            Ok((r.label(), a, b))
        })
        .collect()
}

fn check_cf(cfg: SearchConfig) -> Result<String> {
    let pairs = cf_pairs(cfg)?;
    let mut parts = Vec::new();
    for (label, a, b) in &pairs {
        ensure!(
            (a - b).abs() <= CF_TOLERANCE,
            "{label}: min form {a:.4} vs constrained {b:.4}"
        );
        parts.push(format!("{a:.4}/{b:.4}"));
    }
    Ok(format!(
        "grid {} |Yhat| {}: {}",
        cfg.grid_resolution,
        cfg.yhat_max_size,
        parts.join(", ")
    ))
}

fn check_backward_dominates() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let mut count = 0;
    for sizes in [
        BINARY,
        Alphabets {
            x1: 3,
            x2: 2,
            y2: 2,
            y3: 3,
        },
        Alphabets {
            x1: 2,
            x2: 3,
            y2: 3,
            y3: 2,
        },
    ] {
        let ch = random_channel(&mut rng, sizes)?;
        for k in 0..50 {
            let d = random_distribution(&mut rng, &ch, 1 + k % 3)?;
            let r = evaluate_bounds(&ch, &d)?;
            ensure!(
                r.backward_rate >= r.sliding_rate - 1e-9,
                "backward {} < sliding {}",
                r.backward_rate,
                r.sliding_rate
            );
            count += 1;
        }
    }
    Ok(format!("{count} distributions"))
}

/// `(distinct relay codewords, relay indices)` for the primitive channel with
/// `|X2| = 2`, `n = 4`, `R2 = 2`.
pub fn hashing_census() -> Result<(usize, usize)> {
    let ch = make_channel(&ChannelRecipe::Primitive { p3: 0.1, r0: 1.0 })?;
    let d = CodingDistribution::identity_quantizer(vec![0.5, 0.5], vec![0.5, 0.5], ch.alph_y2)?;
    let params = SimParams {
        n: 4,
        blocks: 1,
        rate: 0.25,
        r2: 2.0,
        epsilon: 0.5,
        seed: 0,
        decoder: DecoderKind::Sliding,
        metric: Metric::MaxScore,
        last_block_multiplier: 1,
    };
    let books = Protocol::new(&ch, &d, &params)?.codebooks(0)?;
    Ok(implicit_hashing_census(&books, 1)?)
}

fn check_census() -> Result<String> {
    let (distinct, indices) = hashing_census()?;
    ensure!(
        indices == 256 && distinct <= 16,
        "{distinct} distinct codewords for {indices} indices"
    );
    Ok(format!(
        "{distinct} distinct codewords for {indices} indices"
    ))
}

/// Relay quantization failure rate at each block length, under strict
/// typicality with `R2` a fixed margin above the quantization bound.
pub fn quantization_trend(lengths: &[usize], trials: usize) -> Result<Vec<f64>> {
    let ch = make_channel(&ChannelRecipe::OrthogonalBsc { p2: 0.05, p3: 0.2 })?;
    let d = CodingDistribution::identity_quantizer(vec![0.5, 0.5], vec![0.5, 0.5], ch.alph_y2)?;
    let r2 = evaluate_bounds(&ch, &d)?.quantization_bound + 0.15;
    lengths
        .iter()
        .map(|&n| {
            let params = SimParams {
                n,
                blocks: 1,
                rate: 0.1,
                r2,
                epsilon: 0.9,
                seed: 0,
                decoder: DecoderKind::Sliding,
                metric: Metric::Typicality,
                last_block_multiplier: 1,
            };
            Ok(run_monte_carlo(&ch, &d, &params, trials)?.quantization_failure_rate)
        })
        .collect()
}

fn check_quantization_trend() -> Result<String> {
    let rates = quantization_trend(&[4, 8, 12, 16], 200)?;
    let shown: Vec<String> = rates.iter().map(|r| format!("{r:.3}")).collect();
    ensure!(
        rates.windows(2).all(|w| w[1] < w[0]),
        "not strictly decreasing over n = 4, 8, 12, 16: {}",
        shown.join(", ")
    );
    Ok(format!("n = 4, 8, 12, 16: {}", shown.join(", ")))
}

fn timed(name: &'static str, f: impl FnOnce() -> Result<String>) -> CheckResult {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(d) => (true, d),
        Err(e) => (false, format!("{e:#}")),
    };
    CheckResult {
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

type Check<'a> = Box<dyn FnOnce() -> Result<String> + 'a>;

/// Runs every check of `level`, calling `report` as each one finishes.
pub fn run_checks(
    level: Level,
    mi: &MiFn,
    mut report: impl FnMut(&CheckResult),
) -> Vec<CheckResult> {
    let cf = match level {
        Level::Fast => SearchConfig {
            grid_resolution: 4,
            yhat_max_size: 2,
            include_degenerate: true,
        },
        Level::Full => SearchConfig {
            grid_resolution: 8,
            yhat_max_size: 3,
            include_degenerate: true,
        },
    };
    let mut checks: Vec<(&'static str, Check<'_>)> = vec![
        ("mutual_information", Box::new(|| check_mi(mi))),
        ("fme_agreement", Box::new(check_fme)),
        ("cf_forms_agree", Box::new(move || check_cf(cf))),
        ("backward_dominates", Box::new(check_backward_dominates)),
        ("implicit_hashing", Box::new(check_census)),
    ];
    if level == Level::Full {
        checks.push(("quantization_trend", Box::new(check_quantization_trend)));
    }
    checks
        .into_iter()
        .map(|(name, f)| {
            let r = timed(name, f);
            report(&r);
            r
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_agrees_on_a_hand_value() {
        let e = 0.11;
        let p = JointPmf::new(
            [
                ("A", Alphabet::new(2).unwrap()),
                ("B", Alphabet::new(2).unwrap()),
            ],
            vec![0.5 * (1.0 - e), 0.5 * e, 0.5 * e, 0.5 * (1.0 - e)],
        )
        .unwrap();
        assert!((brute_force_mi(&p, &[0], &[1], &[]) - 0.500084041835472).abs() < 1e-12);
    }

    #[test]
    fn fast_suite_passes() {
        let results = run_checks(Level::Fast, &library_mi, |_| {});
        assert!(results.iter().all(|r| r.passed), "{results:#?}");
    }

    #[test]
    fn faulty_mutual_information_fails_the_suite() {
        let off_by_a_bit = |p: &JointPmf, a: &[&str], b: &[&str], c: &[&str]| {
            Ok(p.mutual_information(a, b, c)? * (1.0 + 1e-6))
        };
        let results = run_checks(Level::Fast, &off_by_a_bit, |_| {});
        assert!(!results[0].passed);
        assert!(results[0].line().starts_with("FAIL mutual_information"));
    }
}
