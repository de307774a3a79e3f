//! Trajectory analytics: time averages, distance to pure strategies, external
//! regret, power-law fits of regret growth and occupancy histograms.

mod suite;

pub use suite::{run_experiment_suite, RunRow, SuiteReport, SuiteSpec, SummaryRow};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{MixedProfile, NetworkGame};
use crate::learning::Trajectory;
use crate::numeric::dot;

pub const DEFAULT_BURN_IN: usize = 10;
pub const DEFAULT_BINS: usize = 50;

/// Running means `X̄^t = (x^1 + ... + x^t) / t` for `t = 1..=T`.
pub fn time_average(trajectory: &Trajectory) -> Result<Vec<MixedProfile>> {
    if trajectory.horizon() == 0 {
        return Err(Error::InsufficientData(
            "time average of an empty trajectory".into(),
        ));
    }
    let mut sum: Vec<Vec<f64>> = trajectory
        .initial
        .x
        .as_slices()
        .iter()
        .map(|v| vec![0.0; v.len()])
        .collect();
    Ok(trajectory
        .profiles()
        .enumerate()
        .map(|(k, x)| {
            for (acc, xi) in sum.iter_mut().zip(x.as_slices()) {
                acc.iter_mut().zip(xi).for_each(|(a, v)| *a += v);
            }
            let t = (k + 1) as f64;
            MixedProfile::from_vecs_unchecked(
                sum.iter()
                    .map(|v| v.iter().map(|a| a / t).collect())
                    .collect(),
            )
        })
        .collect())
}

/// Euclidean distance from `x` to the nearest vertex, taking each agent's
/// nearest vertex at its largest coordinate (lowest index on ties).
pub fn distance_to_closest_pure(x: &MixedProfile) -> f64 {
    x.as_slices()
        .iter()
        .map(|xi| {
            let best = xi
                .iter()
                .enumerate()
                .fold(0, |b, (k, &v)| if v > xi[b] { k } else { b });
            xi.iter()
                .enumerate()
                .map(|(k, &v)| {
                    let d = if k == best { 1.0 - v } else { v };
                    d * d
                })
                .sum::<f64>()
        })
        .sum::<f64>()
        .sqrt()
}

/// Per-step external regret of one agent and its running maximum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegretSeries {
    pub agent: usize,
    /// `regret[t - 1]` is `R(t)`.
    pub regret: Vec<f64>,
    /// `running_max[t - 1]` is `max_{k <= t} R(k)`.
    pub running_max: Vec<f64>,
    /// Set when payoffs were taken against opponents' mixed strategies
    /// because the trajectory has no realized profiles.
    pub mixed_opponents: bool,
}

impl RegretSeries {
    /// Wraps a precomputed regret sequence.
    pub fn from_regret(agent: usize, regret: Vec<f64>) -> Self {
        let mut best = f64::NEG_INFINITY;
        let running_max = regret
            .iter()
            .map(|&r| {
                best = best.max(r);
                best
            })
            .collect();
        RegretSeries {
            agent,
            regret,
            running_max,
            mixed_opponents: false,
        }
    }

    pub fn len(&self) -> usize {
        self.regret.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regret.is_empty()
    }
}

/// Streaming external regret: feed the payoff vector of each round and the
/// mixture that was played against it.
#[derive(Clone, Debug)]
pub struct RegretTracker {
    cumulative: Vec<f64>,
    earned: f64,
    best: f64,
}

impl RegretTracker {
    pub fn new(strategies: usize) -> Self {
        RegretTracker {
            cumulative: vec![0.0; strategies],
            earned: 0.0,
            best: f64::NEG_INFINITY,
        }
    }

    /// Records one round and returns `(R(t), max_{k <= t} R(k))`.
    pub fn push(&mut self, payoff: &[f64], played: &[f64]) -> (f64, f64) {
        self.cumulative
            .iter_mut()
            .zip(payoff)
            .for_each(|(c, u)| *c += u);
        self.earned += dot(played, payoff);
        let r = self
            .cumulative
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
            - self.earned;
        self.best = self.best.max(r);
        (r, self.best)
    }
}

/// What the agent's payoff vector in round `t` is measured against.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegretBenchmark {
    /// The opponents' realized pure strategies `s^t`.
    #[default]
    Realized,
    /// The opponents' mixtures `x^{t-1}` that `s^t` was drawn from.
    Expected,
}

impl std::str::FromStr for RegretBenchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "realized" => Ok(RegretBenchmark::Realized),
            "expected" => Ok(RegretBenchmark::Expected),
            other => Err(Error::Config(format!("unknown regret benchmark {other:?}"))),
        }
    }
}

/// External regret of `agent`: the best fixed strategy's cumulative payoff
/// minus the expected payoff of the mixtures actually played (`x^{t-1}` in
/// round `t`), with payoff vectors taken against `benchmark`.
///
/// Deterministic trajectories have no realizations; payoffs are then taken
/// against the opponents' mixtures and the series is flagged.
pub fn external_regret(
    game: &NetworkGame,
    trajectory: &Trajectory,
    agent: usize,
    benchmark: RegretBenchmark,
) -> Result<RegretSeries> {
    if agent >= game.num_agents() {
        return Err(Error::Shape(format!("agent {agent} out of range")));
    }
    let mut tracker = RegretTracker::new(game.strategy_counts()[agent]);
    let mut mixed_opponents = false;
    let mut regret = Vec::with_capacity(trajectory.horizon());
    let mut running_max = Vec::with_capacity(trajectory.horizon());
    for t in 1..=trajectory.horizon() {
        let played = trajectory.profile(t - 1);
        let payoff = match (&trajectory.steps[t - 1].realized, benchmark) {
            (Some(s), RegretBenchmark::Realized) => game.payoff_vector_pure(agent, s)?,
            (None, RegretBenchmark::Realized) => {
                mixed_opponents = true;
                game.payoff_vector(agent, played)?
            }
            (_, RegretBenchmark::Expected) => game.payoff_vector(agent, played)?,
        };
        let (r, m) = tracker.push(&payoff, played.agent(agent));
        regret.push(r);
        running_max.push(m);
    }
    Ok(RegretSeries {
        agent,
        regret,
        running_max,
        mixed_opponents,
    })
}

/// `ln R̄(t) ≈ alpha ln t + ln beta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegressionFit {
    pub alpha: f64,
    pub beta: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Ordinary least squares of `ln R̄(t)` on `ln t` over `t > burn_in` with
/// `R̄(t) > 0`.
pub fn estimate_alpha(series: &RegretSeries, burn_in: usize) -> Result<RegressionFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = series
        .running_max
        .iter()
        .enumerate()
        .map(|(k, &r)| (k + 1, r))
        .filter(|&(t, r)| t > burn_in && r > 0.0)
        .map(|(t, r)| ((t as f64).ln(), r.ln()))
        .unzip();
    let (slope, intercept, r_squared) = ols(&xs, &ys)?;
    Ok(RegressionFit {
        alpha: slope,
        beta: intercept.exp(),
        r_squared,
        points: xs.len(),
    })
}

/// Simple linear regression `y = a x + b`; returns `(a, b, R^2)` with `R^2`
/// clamped to `[0, 1]`.
fn ols(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "regression needs at least 2 positive points, got {n}"
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("regressor has no spread".into()));
    }
    let a = sxy / sxx;
    let b = my - a * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (a * x + b);
            e * e
        })
        .sum();
    let r2 = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok((a, b, r2.clamp(0.0, 1.0)))
}

/// A coordinate `x_{agent, strategy}` of the strategy space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Coordinate {
    pub agent: usize,
    pub strategy: usize,
}

/// Visit counts over a `bins x bins` grid on `[0, 1]^2`; `counts[r][c]` counts
/// iterates with the first coordinate in row bin `r` and the second in column
/// bin `c`. The value 1 falls into the last bin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Heatmap {
    pub bins: usize,
    pub counts: Vec<Vec<u64>>,
}

impl Heatmap {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

/// Histogram of `(x^t_a, x^t_b)` for `t = 1..=T`.
pub fn occupancy_heatmap(
    trajectory: &Trajectory,
    first: Coordinate,
    second: Coordinate,
    bins: usize,
) -> Result<Heatmap> {
    if bins == 0 {
        return Err(Error::Config("heatmap needs at least one bin".into()));
    }
    let x0 = &trajectory.initial.x;
    for c in [first, second] {
        if c.agent >= x0.num_agents() || c.strategy >= x0.agent(c.agent).len() {
            return Err(Error::Shape(format!("coordinate {c:?} out of range")));
        }
        if x0.agent(c.agent).len() < 2 {
            return Err(Error::Shape(format!(
                "agent {} has a single strategy",
                c.agent
            )));
        }
    }
    let bin = |v: f64| ((v * bins as f64).floor().max(0.0) as usize).min(bins - 1);
    let mut counts = vec![vec![0u64; bins]; bins];
    for x in trajectory.profiles() {
        let r = bin(x.agent(first.agent)[first.strategy]);
        let c = bin(x.agent(second.agent)[second.strategy]);
        counts[r][c] += 1;
    }
    Ok(Heatmap { bins, counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::PureProfile;
    use crate::learning::{run, DynamicsConfig, Mode, Regularizer, State, Step};
    use proptest::prelude::*;

    fn scripted(xs: &[MixedProfile], realized: Option<&[PureProfile]>) -> Trajectory {
        let n = xs[0].num_agents();
        let zeros: Vec<Vec<f64>> = xs[0]
            .as_slices()
            .iter()
            .map(|v| vec![0.0; v.len()])
            .collect();
        Trajectory {
            mode: if realized.is_some() {
                Mode::Stochastic
            } else {
                Mode::Deterministic
            },
            config: DynamicsConfig::uniform(n, 1.0, Regularizer::Entropy, xs.len() - 1, 0),
            initial: State {
                y: zeros.clone(),
                x: xs[0].clone(),
            },
            steps: xs[1..]
                .iter()
                .enumerate()
                .map(|(k, x)| Step {
                    y: zeros.clone(),
                    x: x.clone(),
                    realized: realized.map(|r| r[k].clone()),
                })
                .collect(),
        }
    }

    fn prof(v: Vec<Vec<f64>>) -> MixedProfile {
        MixedProfile::new(v).unwrap()
    }

    #[test]
    fn time_average_examples() {
        let a = prof(vec![vec![0.2, 0.8]]);
        let b = prof(vec![vec![0.6, 0.4]]);
        let tr = scripted(&[a.clone(), a.clone(), a.clone()], None);
        assert!(time_average(&tr)
            .unwrap()
            .iter()
            .all(|x| x.max_abs_diff(&a) < 1e-15));
        let tr = scripted(
            &[a.clone(), a.clone(), b.clone(), a.clone(), b.clone()],
            None,
        );
        let avg = time_average(&tr).unwrap();
        assert!(avg[1].max_abs_diff(&prof(vec![vec![0.4, 0.6]])) < 1e-15);
        assert!(avg[3].max_abs_diff(&prof(vec![vec![0.4, 0.6]])) < 1e-15);
        assert!(time_average(&scripted(&[a], None)).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(
            distance_to_closest_pure(&prof(vec![vec![0.0, 1.0], vec![1.0, 0.0, 0.0]])),
            0.0
        );
        let u = MixedProfile::uniform(&[2, 2]);
        assert!((distance_to_closest_pure(&u) - 1.0).abs() < 1e-15);
        let one = MixedProfile::uniform(&[2]);
        assert!((distance_to_closest_pure(&one) - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn regret_one_step_example() {
        let g = NetworkGame::matching_pennies();
        let xs = [
            MixedProfile::uniform(&[2, 2]),
            MixedProfile::uniform(&[2, 2]),
        ];
        let tr = scripted(&xs, Some(&[PureProfile(vec![0, 0])]));
        let r = external_regret(&g, &tr, 0, RegretBenchmark::Realized).unwrap();
        assert_eq!(r.regret, vec![1.0]);
        assert!(!r.mixed_opponents);
    }

    #[test]
    fn best_responder_has_zero_regret() {
        let g = NetworkGame::matching_pennies();
        let br = prof(vec![vec![1.0, 0.0], vec![1.0, 0.0]]);
        let xs = vec![br; 6];
        let realized = vec![PureProfile(vec![0, 0]); 5];
        let r = external_regret(
            &g,
            &scripted(&xs, Some(&realized)),
            0,
            RegretBenchmark::Realized,
        )
        .unwrap();
        assert!(r.regret.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn deterministic_regret_is_flagged() {
        let g = NetworkGame::rock_paper_scissors();
        let cfg = DynamicsConfig::uniform(2, 0.1, Regularizer::Entropy, 20, 0);
        let tr = run(&g, &cfg, Mode::Deterministic).unwrap();
        let r = external_regret(&g, &tr, 1, RegretBenchmark::Realized).unwrap();
        assert!(r.mixed_opponents);
        assert!(r.regret.iter().all(|v| v.abs() < 1e-12));
        let e = external_regret(&g, &tr, 1, RegretBenchmark::Expected).unwrap();
        assert!(!e.mixed_opponents);
        assert_eq!(e.regret, r.regret);
    }

    #[test]
    fn expected_benchmark_uses_mixtures() {
        let g = NetworkGame::matching_pennies();
        let x0 = prof(vec![vec![0.5, 0.5], vec![0.8, 0.2]]);
        let tr = scripted(&[x0.clone(), x0], Some(&[PureProfile(vec![0, 1])]));
        let r = external_regret(&g, &tr, 0, RegretBenchmark::Expected).unwrap();
        // Payoff vector against (0.8, 0.2) is (0.6, -0.6); the mixture earns 0.
        assert!((r.regret[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn best_response_oracle_bounds_trajectory_regret() {
        let g = NetworkGame::rock_paper_scissors();
        let cfg = DynamicsConfig::uniform(2, 0.1, Regularizer::Entropy, 2000, 9);
        let tr = run(&g, &cfg, Mode::Stochastic).unwrap();
        let r = external_regret(&g, &tr, 0, RegretBenchmark::Realized).unwrap();
        let mut oracle = RegretTracker::new(3);
        for (t, step) in tr.steps.iter().enumerate() {
            let u = g
                .payoff_vector_pure(0, step.realized.as_ref().unwrap())
                .unwrap();
            let best = u
                .iter()
                .enumerate()
                .fold(0, |b, (k, &v)| if v > u[b] { k } else { b });
            let mut e = vec![0.0; 3];
            e[best] = 1.0;
            let (ro, _) = oracle.push(&u, &e);
            assert!(ro <= r.regret[t] + 1e-12);
        }
    }

    #[test]
    fn power_law_fits() {
        for (alpha, beta) in [(0.5, 3.0), (1.0, 1.0), (0.25, 0.5)] {
            let s = RegretSeries::from_regret(
                0,
                (1..=5000).map(|t| beta * (t as f64).powf(alpha)).collect(),
            );
            let f = estimate_alpha(&s, DEFAULT_BURN_IN).unwrap();
            assert!((f.alpha - alpha).abs() < 1e-9);
            assert!((f.beta - beta).abs() < 1e-9);
            assert!((f.r_squared - 1.0).abs() < 1e-9);
            assert_eq!(f.points, 4990);
        }
    }

    #[test]
    fn regression_needs_two_points() {
        let s = RegretSeries::from_regret(0, vec![1.0; 11]);
        assert!(matches!(
            estimate_alpha(&s, 10),
            Err(Error::InsufficientData(_))
        ));
        let s = RegretSeries::from_regret(0, vec![0.0; 50]);
        assert!(matches!(
            estimate_alpha(&s, 10),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn heatmap_constant_and_conservation() {
        let a = prof(vec![vec![0.3, 0.7], vec![1.0, 0.0]]);
        let tr = scripted(&vec![a; 8], None);
        let c0 = Coordinate {
            agent: 0,
            strategy: 0,
        };
        let c1 = Coordinate {
            agent: 1,
            strategy: 0,
        };
        let h = occupancy_heatmap(&tr, c0, c1, 10).unwrap();
        assert_eq!(h.total(), 7);
        assert_eq!(h.counts[3][9], 7);
        assert_eq!(h.counts.iter().flatten().filter(|&&c| c > 0).count(), 1);
        assert!(occupancy_heatmap(
            &tr,
            c0,
            Coordinate {
                agent: 2,
                strategy: 0
            },
            10
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn running_max_nondecreasing(r in prop::collection::vec(-5.0f64..5.0, 1..200)) {
            let s = RegretSeries::from_regret(0, r);
            prop_assert!(s.running_max.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn distance_bounds(w in prop::collection::vec(prop::collection::vec(0.001f64..1.0, 2..5), 1..4)) {
            let rows: Vec<Vec<f64>> = w.into_iter().map(|r| {
                let s: f64 = r.iter().sum();
                r.into_iter().map(|v| v / s).collect()
            }).collect();
            let n = rows.len();
            let d = distance_to_closest_pure(&MixedProfile::new(rows).unwrap());
            prop_assert!(d > 0.0 && d <= (2.0 * n as f64).sqrt());
        }

        #[test]
        fn time_average_is_a_distribution(seed in 0u64..500) {
            let g = NetworkGame::rock_paper_scissors();
            let cfg = DynamicsConfig::uniform(2, 0.3, Regularizer::Entropy, 50, seed);
            let tr = run(&g, &cfg, Mode::Stochastic).unwrap();
            for x in time_average(&tr).unwrap() {
                for xi in x.as_slices() {
                    prop_assert!(xi.iter().all(|&v| v >= 0.0));
                    prop_assert!((xi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
