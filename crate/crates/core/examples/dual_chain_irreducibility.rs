//! Exact enumeration of the payoff-space chain of stochastic MWU, and a
//! check that every reachable state has a positive-probability way home.
//!
//!     cargo run --release --example dual_chain_irreducibility

use num_rational::BigRational;
use stochastic_ftrl::game::RationalGame;
use stochastic_ftrl::learning::Regularizer;
use stochastic_ftrl::markov::{check_irreducible, common_denominator, enumerate_states, DualState};
use stochastic_ftrl::MixedProfile;

fn main() -> stochastic_ftrl::Result<()> {
    let third = |k: usize| {
        MixedProfile::new(vec![
            vec![BigRational::new(1.into(), (k as i64).into()); k];
            2
        ])
    };
    let games = [
        (
            "matching pennies",
            RationalGame::matching_pennies(),
            third(2)?,
        ),
        (
            "rock-paper-scissors",
            RationalGame::rock_paper_scissors(),
            third(3)?,
        ),
    ];
    for (name, game, x_star) in games {
        let origin = DualState::zero(game.strategy_counts());
        let graph = enumerate_states(&game, &origin, 4, 1_000_000)?;
        let layer_sizes: Vec<usize> = graph.layers.iter().map(Vec::len).collect();
        let report = check_irreducible(
            &graph,
            &game,
            &[Regularizer::Entropy; 2],
            &[0.1, 0.1],
            &origin,
            &x_star,
        )?;
        println!("{name}: b = {}", common_denominator(&x_star));
        println!(
            "  states per layer {layer_sizes:?}, {} edges",
            graph.edges.len()
        );
        println!(
            "  reached {}/{}, returned {}/{}, longest return path {}",
            report.reached, report.states, report.returned, report.states, report.max_return_length
        );
        println!(
            "  irreducible on the enumerated subgraph: {}",
            report.is_irreducible()
        );
    }
    Ok(())
}
