//! Stochastic MWU on matching pennies, started at the equilibrium. The KL
//! divergence to the equilibrium grows, and the time spent in the interior
//! shrinks.
//!
//!     cargo run --release --example matching_pennies_divergence

use stochastic_ftrl::divergences::kl_divergence;
use stochastic_ftrl::learning::{run, DynamicsConfig, Mode, Regularizer};
use stochastic_ftrl::markov::{occupation_between, Region};
use stochastic_ftrl::{MixedProfile, NetworkGame};

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    v[v.len() / 2]
}

fn main() -> stochastic_ftrl::Result<()> {
    let game = NetworkGame::matching_pennies();
    let x_star = MixedProfile::uniform(&[2, 2]);
    let eta = 1.1f64.ln(); // epsilon = 0.1
    let checkpoints = [10, 100, 500, 1000, 3000];
    let region = Region::InteriorBox { delta: 0.2 };

    let mut kl = vec![Vec::new(); checkpoints.len()];
    let (mut early, mut late) = (0.0, 0.0);
    let seeds = 100;
    for seed in 0..seeds {
        let cfg = DynamicsConfig::uniform(2, eta, Regularizer::Entropy, 3000, seed);
        let tr = run(&game, &cfg, Mode::Stochastic)?;
        for (k, &t) in checkpoints.iter().enumerate() {
            kl[k].push(kl_divergence(&x_star, tr.profile(t))?.total);
        }
        early += occupation_between(&tr, &region, 0, 1000)?;
        late += occupation_between(&tr, &region, 2000, 3000)?;
    }

    println!("median KL(x* || x^t) over {seeds} seeds");
    for (k, t) in checkpoints.iter().enumerate() {
        println!("  t = {t:>4}: {:.4}", median(kl[k].clone()));
    }
    println!("mean time in the delta = 0.2 box");
    println!("  steps    0-1000: {:.3}", early / seeds as f64);
    println!("  steps 2000-3000: {:.3}", late / seeds as f64);
    Ok(())
}
