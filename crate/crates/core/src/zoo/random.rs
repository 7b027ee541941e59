use rand::Rng;

use crate::error::Result;
use crate::info::Alphabet;
use crate::region::{CodingDistribution, RelayChannelSpec};

use super::file::Alphabets;

/// A point drawn uniformly from the probability simplex of dimension `k`.
pub fn random_simplex_point<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|x| x / sum).collect()
}

/// A channel whose kernel rows are independent uniform simplex points.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, a: Alphabets) -> Result<RelayChannelSpec> {
    let row = a.y2 * a.y3;
    let kernel = (0..a.x1 * a.x2)
        .flat_map(|_| random_simplex_point(rng, row))
        .collect();
    RelayChannelSpec::new(
        Alphabet::new(a.x1)?,
        Alphabet::new(a.x2)?,
        Alphabet::new(a.y2)?,
        Alphabet::new(a.y3)?,
        kernel,
    )
}

/// Random inputs and a random quantizer with `yhat` symbols for `ch`.
pub fn random_distribution<R: Rng + ?Sized>(
    rng: &mut R,
    ch: &RelayChannelSpec,
    yhat: usize,
) -> Result<CodingDistribution> {
    let p_x1 = random_simplex_point(rng, ch.alph_x1.size());
    let p_x2 = random_simplex_point(rng, ch.alph_x2.size());
    let q = (0..ch.alph_x2.size() * ch.alph_y2.size())
        .flat_map(|_| random_simplex_point(rng, yhat))
        .collect();
    CodingDistribution::new(p_x1, p_x2, ch.alph_y2, Alphabet::new(yhat)?, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_instances_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let ch = random_channel(
                &mut rng,
                Alphabets {
                    x1: 2,
                    x2: 3,
                    y2: 2,
                    y3: 4,
                },
            )
            .unwrap();
            let d = random_distribution(&mut rng, &ch, 3).unwrap();
            assert!(d.check_compatible(&ch).is_ok());
        }
        let p = random_simplex_point(&mut rng, 1);
        assert_eq!(p, vec![1.0]);
    }
}
