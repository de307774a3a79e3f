use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use super::{MixedProfile, NetworkGame};
use crate::error::{Error, Result};
use crate::numeric::Matrix;

/// Distribution of the entries of a random payoff matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EntryDistribution {
    Uniform { low: f64, high: f64 },
    Normal { mean: f64, std_dev: f64 },
}

impl Default for EntryDistribution {
    fn default() -> Self {
        EntryDistribution::Uniform {
            low: -1.0,
            high: 1.0,
        }
    }
}

type Sampler = Box<dyn Fn(&mut ChaCha8Rng) -> f64>;

impl EntryDistribution {
    fn sampler(&self) -> Result<Sampler> {
        match *self {
            EntryDistribution::Uniform { low, high } => {
                let u = Uniform::new(low, high)
                    .map_err(|e| Error::Config(format!("uniform({low}, {high}): {e}")))?;
                Ok(Box::new(move |rng| u.sample(rng)))
            }
            EntryDistribution::Normal { mean, std_dev } => {
                let d = Normal::new(mean, std_dev)
                    .map_err(|e| Error::Config(format!("normal({mean}, {std_dev}): {e}")))?;
                Ok(Box::new(move |rng| d.sample(rng)))
            }
        }
    }
}

/// Two-agent `n x n` zero-sum game with i.i.d. entries and `A^(21) = -A^T`.
///
/// Entries are pairwise distinct: a draw that repeats an earlier entry is
/// redrawn. The same seed always yields the same game.
pub fn random_zero_sum(n: usize, seed: u64, dist: &EntryDistribution) -> Result<NetworkGame> {
    if n < 2 {
        return Err(Error::Config(format!("random games need n >= 2, got {n}")));
    }
    let sample = dist.sampler()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(n * n);
    let mut entries = Vec::with_capacity(n * n);
    while entries.len() < n * n {
        let v = sample(&mut rng);
        // -0.0 and 0.0 compare equal, so key on the canonical value.
        let key = if v == 0.0 { 0u64 } else { v.to_bits() };
        if seen.insert(key) {
            entries.push(v);
        }
    }
    let a = Matrix::from_fn(n, n, |r, c| entries[r * n + c]);
    Ok(NetworkGame::two_player(a))
}

/// Two-agent zero-sum game with a known fully mixed equilibrium at which
/// both payoff vectors vanish.
///
/// Draws `B` with uniform[-1, 1] entries and interior `x*`, `y*`, then
/// returns `A = B - (B y*) 1^T - 1 (x*^T B) + (x*^T B y*) 1 1^T`, for which
/// `A y* = 0` and `x*^T A = 0`.
pub fn random_interior_nash_game(
    rows: usize,
    cols: usize,
    seed: u64,
) -> (NetworkGame, MixedProfile) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = Matrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0));
    let mut interior = |n: usize| {
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.0)).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|v| v / s).collect::<Vec<_>>()
    };
    let x = interior(rows);
    let y = interior(cols);
    let by = b.mul_vec(&y);
    let xb = b.vec_mul(&x);
    let xby: f64 = x.iter().zip(&by).map(|(a, b)| a * b).sum();
    let a = Matrix::from_fn(rows, cols, |r, c| b.get(r, c) - by[r] - xb[c] + xby);
    (
        NetworkGame::two_player(a),
        MixedProfile::from_vecs_unchecked(vec![x, y]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_games_are_reproducible() {
        let d = EntryDistribution::default();
        let a = random_zero_sum(10, 1, &d).unwrap();
        let b = random_zero_sum(10, 1, &d).unwrap();
        let c = random_zero_sum(10, 2, &d).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn entries_distinct_and_zero_sum_over_seeds() {
        for seed in 0..100 {
            let g = random_zero_sum(6, seed, &EntryDistribution::default()).unwrap();
            assert!(g.validate_zero_sum().is_valid());
            let a = g.payoff_matrix(0, 1).unwrap();
            let mut bits: Vec<u64> = a.entries().iter().map(|v| v.to_bits()).collect();
            bits.sort_unstable();
            bits.dedup();
            assert_eq!(bits.len(), 36);
            assert!(a.entries().iter().all(|v| (-1.0..1.0).contains(v)));
        }
    }

    #[test]
    fn distinctness_forces_redraws_on_coarse_distributions() {
        // Normal with tiny spread still produces distinct doubles.
        let d = EntryDistribution::Normal {
            mean: 0.0,
            std_dev: 1e-3,
        };
        let g = random_zero_sum(4, 3, &d).unwrap();
        let mut e = g.payoff_matrix(0, 1).unwrap().entries().to_vec();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(e.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rejects_tiny_games() {
        assert!(random_zero_sum(1, 0, &EntryDistribution::default()).is_err());
    }

    #[test]
    fn interior_nash_games_have_zero_payoff_vectors() {
        for seed in 0..20 {
            let (g, x) = random_interior_nash_game(4, 3, seed);
            assert!(g.validate_zero_sum().is_valid());
            assert!(x.is_fully_mixed());
            for i in 0..2 {
                let u = g.payoff_vector(i, &x).unwrap();
                assert!(u.iter().all(|v| v.abs() < 1e-12), "{u:?}");
            }
            assert!(g.verify_nash(&x, 1e-12).unwrap().is_nash);
            assert!(!g.is_trivial());
        }
    }
}
