//! Canonical relay channels, the JSON channel file, seeded random
//! instances, and the codeword census.
//!
//! Composite outputs are flattened row-major: `Y3 = (a, x2)` with `a` the
//! direct-link symbol becomes the single index `a * |X2| + x2`.

mod file;
mod random;

pub use file::{load_channel_file, save_channel_file, Alphabets, ChannelFile, FILE_ROW_TOLERANCE};
pub use random::{random_channel, random_distribution, random_simplex_point};

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::Alphabet;
use crate::region::RelayChannelSpec;
use crate::sim::CodebookSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelRecipe {
    /// Binary inputs; `Y2 = BSC_p2(X1)`, `Y3 = (BSC_p3(X1), X2)`.
    OrthogonalBsc {
        p2: f64,
        p3: f64,
    },
    /// Relay sees `X1` exactly and reaches the sink over a noiseless pipe of
    /// `r0` bits per use: `|X2| = 2^r0`, `Y2 = X1`, `Y3 = (BSC_p3(X1), X2)`.
    Primitive {
        p3: f64,
        r0: f64,
    },
    /// Binary inputs; `Y2 = X1`, `Y3 = X2`.
    Deterministic,
    Custom(ChannelFile),
}

fn check_crossover(name: &str, p: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::InvalidRecipe(format!(
            "{name} = {p} is outside [0, 0.5]"
        )));
    }
    Ok(())
}

fn bsc(p: f64, input: usize, output: usize) -> f64 {
    if input == output {
        1.0 - p
    } else {
        p
    }
}

/// Relay input alphabet size `2^r0`, which must be an integer.
pub fn relay_alphabet_for_rate(r0: f64) -> Result<usize> {
    if !(r0.is_finite() && r0 >= 0.0) {
        return Err(Error::InvalidRecipe(format!(
            "r0 = {r0} must be a nonnegative number"
        )));
    }
    let size = r0.exp2();
    let rounded = size.round();
    if (size - rounded).abs() > 1e-9 * rounded.max(1.0) || rounded > u16::MAX as f64 {
        return Err(Error::InvalidRecipe(format!(
            "2^r0 = {size} is not a usable integer alphabet size"
        )));
    }
    Ok(rounded as usize)
}

/// `Y3 = (BSC_p3(X1), X2)` with the given relay-to-sink law for `Y2`.
fn bsc_plus_pipe(
    n2: usize,
    p3: f64,
    y2_law: impl Fn(usize, usize) -> f64,
) -> Result<RelayChannelSpec> {
    let ny3 = 2 * n2;
    let mut kernel = vec![0.0; 2 * n2 * 2 * ny3];
    for x1 in 0..2 {
        for x2 in 0..n2 {
            for y2 in 0..2 {
                for a in 0..2 {
                    kernel[((x1 * n2 + x2) * 2 + y2) * ny3 + a * n2 + x2] =
                        y2_law(x1, y2) * bsc(p3, x1, a);
                }
            }
        }
    }
    RelayChannelSpec::new(
        Alphabet::new(2)?,
        Alphabet::new(n2)?,
        Alphabet::new(2)?,
        Alphabet::new(ny3)?,
        kernel,
    )
}

pub fn make_channel(recipe: &ChannelRecipe) -> Result<RelayChannelSpec> {
    match *recipe {
        ChannelRecipe::OrthogonalBsc { p2, p3 } => {
            check_crossover("p2", p2)?;
            check_crossover("p3", p3)?;
            bsc_plus_pipe(2, p3, |x1, y2| bsc(p2, x1, y2))
        }
        ChannelRecipe::Primitive { p3, r0 } => {
            check_crossover("p3", p3)?;
            let n2 = relay_alphabet_for_rate(r0)?;
            bsc_plus_pipe(n2, p3, |x1, y2| if x1 == y2 { 1.0 } else { 0.0 })
        }
        ChannelRecipe::Deterministic => {
            let mut kernel = vec![0.0; 16];
            for x1 in 0..2 {
                for x2 in 0..2 {
                    kernel[((x1 * 2 + x2) * 2 + x1) * 2 + x2] = 1.0;
                }
            }
            let b = Alphabet::new(2)?;
            RelayChannelSpec::new(b, b, b, b, kernel)
        }
        ChannelRecipe::Custom(ref file) => file.to_spec(),
    }
}

/// Binary inputs; `Y2 = BSC_p2(X1)`, `Y3 = X1 xor X2`.
///
/// The relay input reaches the sink only through the source's
/// interference, so `I(X2;Y3) = 0` under uniform inputs while
/// `I(X2;Y3|X1) = 1`: the relay link passes the backward-decoding test but
/// never the sliding-window one.
pub fn interference_relay(p2: f64) -> Result<RelayChannelSpec> {
    check_crossover("p2", p2)?;
    let mut kernel = vec![0.0; 16];
    for x1 in 0..2 {
        for x2 in 0..2 {
            for y2 in 0..2 {
                kernel[((x1 * 2 + x2) * 2 + y2) * 2 + (x1 ^ x2)] = bsc(p2, x1, y2);
            }
        }
    }
    let b = Alphabet::new(2)?;
    RelayChannelSpec::new(b, b, b, b, kernel)
}

impl ChannelRecipe {
    /// Short label used in output rows.
    pub fn label(&self) -> String {
        match self {
            Self::OrthogonalBsc { p2, p3 } => format!("orthogonal_bsc(p2={p2},p3={p3})"),
            Self::Primitive { p3, r0 } => format!("primitive(p3={p3},r0={r0})"),
            Self::Deterministic => "deterministic".to_string(),
            Self::Custom(f) => format!(
                "custom({}x{}x{}x{})",
                f.alphabets.x1, f.alphabets.x2, f.alphabets.y2, f.alphabets.y3
            ),
        }
    }
}

/// Distinct relay codewords in `block` (1-based) against the number of
/// relay indices. Fewer distinct codewords than indices means the relay
/// codebook bins indices whether or not binning was intended.
pub fn implicit_hashing_census(books: &CodebookSet, block: usize) -> Result<(usize, usize)> {
    let last = books.blocks();
    if block == 0 || block > last {
        return Err(Error::BlockOutOfRange { block, last });
    }
    let b = books.block(block - 1);
    let distinct: HashSet<&[u16]> = (0..b.index_count()).map(|v| b.x2(v)).collect();
    Ok((distinct.len(), b.index_count()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::entropy_bits;

    #[test]
    fn primitive_without_relay_link_is_point_to_point() {
        let ch = make_channel(&ChannelRecipe::Primitive { p3: 0.1, r0: 0.0 }).unwrap();
        assert_eq!(ch.alph_x2.size(), 1);
        assert_eq!(ch.alph_y3.size(), 2);
        for x1 in 0..2 {
            for y3 in 0..2 {
                let want = if x1 == y3 { 0.9 } else { 0.1 };
                assert!((ch.prob(x1, 0, x1, y3) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn noiseless_orthogonal_bsc_is_deterministic() {
        let ch = make_channel(&ChannelRecipe::OrthogonalBsc { p2: 0.0, p3: 0.0 }).unwrap();
        for x1 in 0..2 {
            for x2 in 0..2 {
                let row = ch.row(x1, x2);
                assert_eq!(row.iter().filter(|&&p| p == 1.0).count(), 1);
                assert_eq!(row.iter().filter(|&&p| p == 0.0).count(), row.len() - 1);
            }
        }
    }

    #[test]
    fn primitive_output_entropy_matches_kernel_sum() {
        let ch = make_channel(&ChannelRecipe::Primitive { p3: 0.1, r0: 1.0 }).unwrap();
        assert_eq!(ch.alph_x2.size(), 2);
        let mut y3 = vec![0.0; ch.alph_y3.size()];
        for x1 in 0..2 {
            for x2 in 0..2 {
                for y2 in 0..2 {
                    for (k, p) in y3.iter_mut().enumerate() {
                        *p += 0.25 * ch.prob(x1, x2, y2, k);
                    }
                }
            }
        }
        // frozen from scripts/closed_form_oracles.py
        assert!((entropy_bits(&y3) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_recipes() {
        for recipe in [
            ChannelRecipe::Primitive { p3: 0.1, r0: 0.5 },
            ChannelRecipe::Primitive { p3: 0.1, r0: -1.0 },
            ChannelRecipe::Primitive { p3: 0.6, r0: 1.0 },
            ChannelRecipe::OrthogonalBsc { p2: -0.1, p3: 0.1 },
        ] {
            assert!(
                matches!(make_channel(&recipe), Err(Error::InvalidRecipe(_))),
                "{recipe:?}"
            );
        }
        // 2^log2(3) = 3 is integral
        assert_eq!(relay_alphabet_for_rate(3f64.log2()).unwrap(), 3);
    }

    #[test]
    fn recipe_json_shape() {
        let r: ChannelRecipe =
            serde_json::from_str(r#"{"kind":"primitive","p3":0.1,"r0":1}"#).unwrap();
        assert_eq!(r, ChannelRecipe::Primitive { p3: 0.1, r0: 1.0 });
        let r: ChannelRecipe = serde_json::from_str(r#"{"kind":"deterministic"}"#).unwrap();
        assert_eq!(make_channel(&r).unwrap().alph_y3.size(), 2);
    }
}
