//! Three ways to write stochastic MWU (entropic FTRL on cumulative payoffs,
//! the multiplicative update, and exponentiated raw payoff sums) driven by
//! the same sampled actions.
//!
//!     cargo run --example formulation_equivalence

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stochastic_ftrl::game::random_zero_sum;
use stochastic_ftrl::learning::{
    mirror_profile, mwu2_profile, mwu_update, sample_profile, stochastic_update, Regularizer,
};

fn main() -> stochastic_ftrl::Result<()> {
    let game = random_zero_sum(4, 7, &Default::default())?;
    let regs = [Regularizer::Entropy; 2];
    let etas = [0.3, 0.3];
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    let mut y = vec![vec![0.0; 4]; 2];
    let mut raw = y.clone();
    let mut x_ftrl = mirror_profile(&regs, &etas, &y)?;
    let mut x_mwu = x_ftrl.clone();
    let mut worst: f64 = 0.0;
    for t in 1..=1000 {
        let s = sample_profile(&x_ftrl, &mut rng);
        let (y_next, x_next) = stochastic_update(&game, &regs, &etas, &y, &s)?;
        x_mwu = mwu_update(&game, &x_mwu, &etas, &s);
        for (i, sums) in raw.iter_mut().enumerate() {
            let u = game.payoff_vector_pure(i, &s)?;
            sums.iter_mut().zip(u).for_each(|(r, v)| *r += v);
        }
        let x_raw = mwu2_profile(&raw, &etas);
        let dev = x_next.max_abs_diff(&x_mwu).max(x_next.max_abs_diff(&x_raw));
        worst = worst.max(dev);
        if t % 250 == 0 {
            println!(
                "t = {t:>4}  x_1 = {:.4?}  max deviation so far {worst:.2e}",
                x_next.agent(0)
            );
        }
        // Shifting each agent's payoffs by a constant leaves the mirror map unchanged.
        y = y_next
            .into_iter()
            .map(|v| {
                let m = v[0];
                v.into_iter().map(|c| c - m).collect()
            })
            .collect();
        x_ftrl = x_next;
    }
    assert!(worst < 1e-12);
    Ok(())
}
