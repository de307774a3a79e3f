//! Regret-growth exponents of stochastic MWU on random zero-sum games,
//! fitted as running-max regret ~ beta * t^alpha.
//!
//!     cargo run --release --example regret_growth

use stochastic_ftrl::metrics::{run_experiment_suite, SuiteSpec};

fn main() -> stochastic_ftrl::Result<()> {
    let spec = SuiteSpec::new(vec![5, 10], 5, 20_000, 0.1, 0);
    let report = run_experiment_suite(&spec)?;
    println!(
        "{:>3} {:>5} {:>7} {:>8} {:>6}",
        "n", "seed", "alpha", "beta", "R^2"
    );
    for r in &report.runs {
        println!(
            "{:>3} {:>5} {:>7.4} {:>8.4} {:>6.3}",
            r.n, r.seed, r.alpha, r.beta, r.r_squared
        );
    }
    for s in &report.summary {
        println!(
            "n = {}: alpha in [{:.4}, {:.4}], R^2 in [{:.3}, {:.3}]",
            s.n, s.alpha_min, s.alpha_max, s.r2_min, s.r2_max
        );
    }
    Ok(())
}
