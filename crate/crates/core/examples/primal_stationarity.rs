//! In strategy space, pure profiles are absorbing for stochastic MWU while
//! interior points spread over several successors.
//!
//!     cargo run --example primal_stationarity

use stochastic_ftrl::markov::{primal_kernel, pure_stationarity_check, pure_vertices};
use stochastic_ftrl::{MixedProfile, NetworkGame};

fn main() -> stochastic_ftrl::Result<()> {
    let etas = [0.1, 0.1];
    for (name, game) in [
        ("matching pennies", NetworkGame::matching_pennies()),
        ("rock-paper-scissors", NetworkGame::rock_paper_scissors()),
    ] {
        let report = pure_stationarity_check(&game, &etas, &pure_vertices(&game))?;
        println!(
            "{name}: {} vertices, all stationary: {}",
            report.points.len(),
            report.all_stationary()
        );
    }

    let game = NetworkGame::matching_pennies();
    let x = MixedProfile::new(vec![vec![0.7, 0.3], vec![0.4, 0.6]])?;
    println!("kernel at {:?}:", x.as_slices());
    for (next, p) in primal_kernel(&game, &x, &etas)? {
        println!("  p = {p:.2} -> {:.4?}", next.as_slices());
    }
    Ok(())
}
