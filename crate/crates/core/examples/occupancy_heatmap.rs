//! Where stochastic MWU spends its time on matching pennies: a coarse
//! histogram of (x_1, x_2) probabilities of the first strategy.
//!
//!     cargo run --release --example occupancy_heatmap

use stochastic_ftrl::learning::{run, DynamicsConfig, Mode, Regularizer};
use stochastic_ftrl::metrics::{distance_to_closest_pure, occupancy_heatmap, Coordinate};
use stochastic_ftrl::NetworkGame;

fn main() -> stochastic_ftrl::Result<()> {
    let game = NetworkGame::matching_pennies();
    let cfg = DynamicsConfig::uniform(2, 1.1f64.ln(), Regularizer::Entropy, 20_000, 4);
    let tr = run(&game, &cfg, Mode::Stochastic)?;
    let first = Coordinate {
        agent: 0,
        strategy: 0,
    };
    let second = Coordinate {
        agent: 1,
        strategy: 0,
    };
    let heat = occupancy_heatmap(&tr, first, second, 10)?;
    let shades = [' ', '.', ':', '-', '=', '+', '*', '#', '%', '@'];
    let max = *heat.counts.iter().flatten().max().unwrap() as f64;
    println!("rows: agent 1 plays heads with prob 0..1 (top to bottom); columns: agent 2");
    for row in &heat.counts {
        let line: String = row
            .iter()
            .map(|&c| {
                if c == 0 {
                    ' '
                } else {
                    shades[((c as f64 / max).sqrt() * 9.0).round() as usize]
                }
            })
            .collect();
        println!("|{line}|");
    }
    let near = tr
        .profiles()
        .filter(|x| distance_to_closest_pure(x) < 0.2)
        .count();
    println!(
        "{:.1}% of iterates within 0.2 of a pure profile",
        100.0 * near as f64 / tr.horizon() as f64
    );
    Ok(())
}
