//! The Fenchel coupling to an interior equilibrium increases in expectation
//! after every stochastic step; each outcome moves it by at most a constant.
//!
//!     cargo run --example fenchel_drift

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stochastic_ftrl::divergences::one_step_expected_fenchel;
use stochastic_ftrl::game::random_interior_nash_game;
use stochastic_ftrl::learning::Regularizer;
use stochastic_ftrl::{MixedProfile, NetworkGame};

fn main() -> stochastic_ftrl::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let cases = [
        (
            "matching pennies",
            NetworkGame::matching_pennies(),
            MixedProfile::uniform(&[2, 2]),
        ),
        {
            let (g, x) = random_interior_nash_game(3, 3, 5);
            ("random 3x3", g.normalize_nash_value(&x)?, x)
        },
    ];
    for (name, game, x_star) in cases {
        let regs = vec![Regularizer::Entropy; 2];
        let etas = [0.2, 0.2];
        println!("{name}");
        for _ in 0..5 {
            let y: Vec<Vec<f64>> = game
                .strategy_counts()
                .iter()
                .map(|&k| (0..k).map(|_| rng.random_range(-2.0..2.0)).collect())
                .collect();
            let d = one_step_expected_fenchel(&game, &regs, &etas, &x_star, &y, None)?;
            let largest = d
                .outcomes
                .iter()
                .map(|o| o.increase)
                .fold(f64::MIN, f64::max);
            println!(
                "  F = {:.4} -> E[F'] = {:.4} (+{:.2e}), largest jump {largest:.3} <= {:.3}",
                d.current,
                d.expected_next,
                d.expected_increase(),
                d.bound
            );
        }
    }
    Ok(())
}
