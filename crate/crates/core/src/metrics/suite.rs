use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{estimate_alpha, RegretBenchmark, RegretSeries, RegretTracker, DEFAULT_BURN_IN};
use crate::error::{Error, Result};
use crate::game::{random_zero_sum, EntryDistribution};
use crate::learning::{mirror_profile, stochastic_step, Regularizer};

/// Regret-growth experiment: for every strategy count and repetition, draw a
/// random zero-sum game, run stochastic MWU and fit the growth exponent of the
/// running-max regret.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub strategy_counts: Vec<usize>,
    pub repetitions: usize,
    pub horizon: usize,
    pub eta: f64,
    pub seed: u64,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    /// Agent whose regret is fitted.
    #[serde(default)]
    pub agent: usize,
    #[serde(default)]
    pub distribution: EntryDistribution,
    #[serde(default)]
    pub benchmark: RegretBenchmark,
}

fn default_burn_in() -> usize {
    DEFAULT_BURN_IN
}

impl SuiteSpec {
    pub fn new(
        strategy_counts: Vec<usize>,
        repetitions: usize,
        horizon: usize,
        eta: f64,
        seed: u64,
    ) -> Self {
        SuiteSpec {
            strategy_counts,
            repetitions,
            horizon,
            eta,
            seed,
            burn_in: DEFAULT_BURN_IN,
            agent: 0,
            distribution: EntryDistribution::default(),
            benchmark: RegretBenchmark::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub n: usize,
    pub repetition: usize,
    pub seed: u64,
    pub alpha: f64,
    pub beta: f64,
    pub r_squared: f64,
    pub final_regret: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub n: usize,
    pub runs: usize,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub r2_min: f64,
    pub r2_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub runs: Vec<RunRow>,
    pub summary: Vec<SummaryRow>,
}

/// Runs every (n, repetition) pair in parallel. Run `r` (in row-major order
/// over strategy counts, then repetitions) uses seed `spec.seed + r` for both
/// the game and, on a separate ChaCha stream, the sampled play, so the report
/// does not depend on scheduling.
pub fn run_experiment_suite(spec: &SuiteSpec) -> Result<SuiteReport> {
    if !(spec.eta.is_finite() && spec.eta > 0.0) {
        return Err(Error::Config(format!(
            "learning rate must be positive, got {}",
            spec.eta
        )));
    }
    if spec.agent > 1 {
        return Err(Error::Config("random games have two agents".into()));
    }
    let jobs: Vec<(usize, usize, u64)> = spec
        .strategy_counts
        .iter()
        .flat_map(|&n| (0..spec.repetitions).map(move |rep| (n, rep)))
        .enumerate()
        .map(|(r, (n, rep))| (n, rep, spec.seed.wrapping_add(r as u64)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(n, repetition, seed)| single_run(spec, n, repetition, seed))
        .collect::<Result<Vec<_>>>()?;
    let summary = spec
        .strategy_counts
        .iter()
        .map(|&n| {
            let rows: Vec<&RunRow> = runs.iter().filter(|r| r.n == n).collect();
            let fold = |f: fn(&RunRow) -> f64, init: f64, op: fn(f64, f64) -> f64| {
                rows.iter().map(|r| f(r)).fold(init, op)
            };
            SummaryRow {
                n,
                runs: rows.len(),
                alpha_min: fold(|r| r.alpha, f64::INFINITY, f64::min),
                alpha_max: fold(|r| r.alpha, f64::NEG_INFINITY, f64::max),
                r2_min: fold(|r| r.r_squared, f64::INFINITY, f64::min),
                r2_max: fold(|r| r.r_squared, f64::NEG_INFINITY, f64::max),
            }
        })
        .collect();
    Ok(SuiteReport { runs, summary })
}

fn single_run(spec: &SuiteSpec, n: usize, repetition: usize, seed: u64) -> Result<RunRow> {
    let game = random_zero_sum(n, seed, &spec.distribution)?;
    let regs = [Regularizer::Entropy; 2];
    let etas = [spec.eta; 2];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut y = vec![vec![0.0; n]; 2];
    let mut x = mirror_profile(&regs, &etas, &y)?;
    let mut tracker = RegretTracker::new(n);
    let mut regret = Vec::with_capacity(spec.horizon);
    for _ in 0..spec.horizon {
        let (y_next, x_next, s) = stochastic_step(&game, &regs, &etas, &y, &mut rng)?;
        let u = match spec.benchmark {
            RegretBenchmark::Realized => game.payoff_vector_pure(spec.agent, &s)?,
            RegretBenchmark::Expected => game.payoff_vector(spec.agent, &x)?,
        };
        regret.push(tracker.push(&u, x.agent(spec.agent)).0);
        // Cumulative payoffs grow linearly; renormalizing keeps them small
        // without changing the mirror map.
        y = y_next
            .into_iter()
            .map(|v| {
                let first = v[0];
                v.into_iter().map(|c| c - first).collect()
            })
            .collect();
        x = x_next;
    }
    let series = RegretSeries::from_regret(spec.agent, regret);
    let fit = estimate_alpha(&series, spec.burn_in)?;
    Ok(RunRow {
        n,
        repetition,
        seed,
        alpha: fit.alpha,
        beta: fit.beta,
        r_squared: fit.r_squared,
        final_regret: series.running_max.last().copied().unwrap_or(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_suite_shape() {
        let spec = SuiteSpec::new(vec![3], 1, 100, 0.1, 5);
        let r = run_experiment_suite(&spec).unwrap();
        assert_eq!(r.runs.len(), 1);
        assert_eq!(r.summary.len(), 1);
        assert_eq!(r.summary[0].runs, 1);
        assert_eq!(r.summary[0].alpha_min, r.runs[0].alpha);
        assert!((0.0..=1.0).contains(&r.runs[0].r_squared));
    }

    #[test]
    fn suite_is_deterministic() {
        let spec = SuiteSpec::new(vec![3, 4], 3, 300, 0.1, 17);
        let a = run_experiment_suite(&spec).unwrap();
        let b = run_experiment_suite(&spec).unwrap();
        assert_eq!(a, b);
        let seeds: Vec<u64> = a.runs.iter().map(|r| r.seed).collect();
        assert_eq!(seeds, (17..23).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_bad_rate() {
        let spec = SuiteSpec::new(vec![3], 1, 100, 0.0, 5);
        assert!(matches!(run_experiment_suite(&spec), Err(Error::Config(_))));
    }
}
