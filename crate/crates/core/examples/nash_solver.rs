//! Support enumeration for two-player zero-sum games, exact on rationals.
//!
//!     cargo run --example nash_solver

use stochastic_ftrl::game::{random_interior_nash_game, solve_2p_zero_sum, RationalGame};
use stochastic_ftrl::numeric::format_rational;

fn main() -> stochastic_ftrl::Result<()> {
    let rps = RationalGame::rock_paper_scissors();
    let sol = solve_2p_zero_sum(rps.payoff_matrix(0, 1).unwrap())?;
    let show: Vec<Vec<String>> = sol
        .profile
        .as_slices()
        .iter()
        .map(|v| v.iter().map(format_rational).collect())
        .collect();
    println!(
        "rock-paper-scissors: value {}, equilibrium {show:?}",
        format_rational(&sol.value)
    );

    let (game, planted) = random_interior_nash_game(4, 4, 3);
    let sol = solve_2p_zero_sum(game.payoff_matrix(0, 1).unwrap())?;
    let check = game.verify_nash(&sol.profile, 1e-9)?;
    println!("random 4x4: value {:.6}", sol.value);
    println!("  solver  {:.4?}", sol.profile.as_slices());
    println!("  planted {:.4?}", planted.as_slices());
    println!("  largest deviation gain {:.2e}", check.max_violation);
    Ok(())
}
