//! Bregman divergence, KL divergence and Fenchel coupling to an equilibrium,
//! plus an exact one-step drift computation for the coupling.
//!
//! All regularized quantities use the scaled regularizer `h / eta`, so for
//! entropy `fenchel_coupling(x*, y) == bregman(x*, mirror_map(y))` and with
//! `eta = 1` both equal the KL divergence.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{MixedProfile, NetworkGame, PureProfile};
use crate::learning::Regularizer;
use crate::numeric::dot;

/// Default cap on the number of pure profiles enumerated by
/// [`one_step_expected_fenchel`].
pub const DEFAULT_OUTCOME_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub per_agent: Vec<f64>,
    pub total: f64,
}

impl DivergenceReport {
    fn from_terms(per_agent: Vec<f64>) -> Self {
        let total = per_agent.iter().sum();
        DivergenceReport { per_agent, total }
    }
}

fn check_pair(x_star: &MixedProfile, x: &MixedProfile) -> Result<()> {
    let a: Vec<usize> = x_star.as_slices().iter().map(Vec::len).collect();
    let b: Vec<usize> = x.as_slices().iter().map(Vec::len).collect();
    if a != b {
        return Err(Error::Shape(format!(
            "profile shapes {a:?} and {b:?} differ"
        )));
    }
    Ok(())
}

fn check_rates(n: usize, regs: &[Regularizer], etas: &[f64]) -> Result<()> {
    if regs.len() != n || etas.len() != n {
        return Err(Error::Shape(format!(
            "{n} agents but {} regularizers and {} learning rates",
            regs.len(),
            etas.len()
        )));
    }
    Ok(())
}

/// `sum_i (h(x*_i) - h(x_i) - <grad h(x_i), x*_i - x_i>) / eta_i`.
///
/// Entropy needs `x` in the interior; squared-Euclidean accepts any `x`.
pub fn bregman(
    regs: &[Regularizer],
    x_star: &MixedProfile,
    x: &MixedProfile,
    etas: &[f64],
) -> Result<DivergenceReport> {
    check_pair(x_star, x)?;
    check_rates(x.num_agents(), regs, etas)?;
    let terms = (0..x.num_agents())
        .map(|i| {
            let (xs, xi) = (x_star.agent(i), x.agent(i));
            let grad = regs[i].gradient(xi)?;
            let diff: Vec<f64> = xs.iter().zip(xi).map(|(a, b)| a - b).collect();
            Ok((regs[i].value(xs) - regs[i].value(xi) - dot(&grad, &diff)) / etas[i])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DivergenceReport::from_terms(terms))
}

/// `sum_i sum_s x*_s ln(x*_s / x_s)`. Terms with `x*_s = 0` vanish; a
/// strategy in the support of `x*` that `x` gives zero weight yields `+inf`.
pub fn kl_divergence(x_star: &MixedProfile, x: &MixedProfile) -> Result<DivergenceReport> {
    check_pair(x_star, x)?;
    let terms = (0..x.num_agents())
        .map(|i| {
            x_star
                .agent(i)
                .iter()
                .zip(x.agent(i))
                .filter(|(&p, _)| p > 0.0)
                .map(|(&p, &q)| {
                    if q > 0.0 {
                        p * (p.ln() - q.ln())
                    } else {
                        f64::INFINITY
                    }
                })
                .sum()
        })
        .collect();
    Ok(DivergenceReport::from_terms(terms))
}

/// `sum_i h(x*_i) / eta_i + h*_i(y_i) - <y_i, x*_i>` with `h*_i` the conjugate
/// of `h / eta_i`. Invariant under `y_i -> y_i + c 1`.
pub fn fenchel_coupling(
    regs: &[Regularizer],
    x_star: &MixedProfile,
    y: &[Vec<f64>],
    etas: &[f64],
) -> Result<DivergenceReport> {
    let n = x_star.num_agents();
    check_rates(n, regs, etas)?;
    if y.len() != n || (0..n).any(|i| y[i].len() != x_star.agent(i).len()) {
        return Err(Error::Shape(
            "payoff vectors do not match the profile".into(),
        ));
    }
    let terms = (0..n)
        .map(|i| {
            let xs = x_star.agent(i);
            Ok(
                regs[i].value(xs) / etas[i] + regs[i].conjugate_value(&y[i], etas[i])?
                    - dot(&y[i], xs),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DivergenceReport::from_terms(terms))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeDrift {
    pub profile: PureProfile,
    pub probability: f64,
    /// Coupling after this outcome.
    pub next: f64,
    /// `next - current`.
    pub increase: f64,
    /// `sum_i max_k u_i(s)_k`, an upper bound on `increase`.
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FenchelDrift {
    pub expected_next: f64,
    pub current: f64,
    pub outcomes: Vec<OutcomeDrift>,
    /// Largest per-outcome bound over all pure profiles.
    pub bound: f64,
}

impl FenchelDrift {
    pub fn expected_increase(&self) -> f64 {
        self.expected_next - self.current
    }
}

/// Exact conditional expectation of the Fenchel coupling after one stochastic
/// FTRL step from `y`, by enumerating every pure profile.
///
/// `x_star` must be a Nash equilibrium at which every payoff vector vanishes
/// (normalize the game first); otherwise the coupling is not a potential for
/// the dynamics and the per-outcome bound does not apply.
pub fn one_step_expected_fenchel(
    game: &NetworkGame,
    regs: &[Regularizer],
    etas: &[f64],
    x_star: &MixedProfile,
    y: &[Vec<f64>],
    outcome_cap: Option<usize>,
) -> Result<FenchelDrift> {
    let cap = outcome_cap.unwrap_or(DEFAULT_OUTCOME_CAP);
    let outcomes = game
        .strategy_counts()
        .iter()
        .try_fold(1usize, |acc, &k| acc.checked_mul(k))
        .filter(|&m| m <= cap)
        .ok_or_else(|| Error::SizeLimit(format!("more than {cap} pure profiles")))?;
    let report = game.verify_nash(x_star, 1e-9)?;
    if !report.is_nash {
        return Err(Error::NotNash {
            violation: report.max_violation,
            agent: report.agent,
            strategy: report.strategy,
        });
    }
    for i in 0..game.num_agents() {
        let u = game.payoff_vector(i, x_star)?;
        if u.iter().any(|v| v.abs() > 1e-9) {
            return Err(Error::Domain(format!(
                "payoff vector of agent {i} at the equilibrium is not zero; normalize the game"
            )));
        }
    }

    let x = crate::learning::mirror_profile(regs, etas, y)?;
    let current = fenchel_coupling(regs, x_star, y, etas)?.total;
    let mut table = Vec::with_capacity(outcomes);
    let mut expected_increase = 0.0;
    let mut bound = f64::NEG_INFINITY;
    for s in game.pure_profiles() {
        let probability: f64 =
            s.0.iter()
                .enumerate()
                .map(|(i, &k)| x.agent(i)[k])
                .product();
        let mut y_next = y.to_vec();
        let mut b = 0.0;
        for (i, yi) in y_next.iter_mut().enumerate() {
            let u = game.payoff_vector_pure(i, &s)?;
            b += u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            yi.iter_mut().zip(&u).for_each(|(v, d)| *v += d);
        }
        let next = fenchel_coupling(regs, x_star, &y_next, etas)?.total;
        let increase = next - current;
        expected_increase += probability * increase;
        bound = bound.max(b);
        table.push(OutcomeDrift {
            profile: s,
            probability,
            next,
            increase,
            bound: b,
        });
    }
    Ok(FenchelDrift {
        expected_next: current + expected_increase,
        current,
        outcomes: table,
        bound,
    })
}
