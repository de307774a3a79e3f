use rand::Rng;

use super::Regularizer;
use crate::error::{Error, Result};
use crate::game::{MixedProfile, NetworkGame, PureProfile};
use crate::numeric::Scalar;

/// Per-agent cumulative payoff vectors.
pub type DualProfile = Vec<Vec<f64>>;

fn check_learners(game: &NetworkGame, regs: &[Regularizer], etas: &[f64]) -> Result<()> {
    let n = game.num_agents();
    if regs.len() != n || etas.len() != n {
        return Err(Error::Shape(format!(
            "{n} agents but {} regularizers and {} learning rates",
            regs.len(),
            etas.len()
        )));
    }
    if let Some(eta) = etas.iter().find(|&&e| !(e.is_finite() && e > 0.0)) {
        return Err(Error::Config(format!(
            "learning rate must be positive, got {eta}"
        )));
    }
    Ok(())
}

fn check_dual(game: &NetworkGame, y: &[Vec<f64>]) -> Result<()> {
    let lens: Vec<usize> = y.iter().map(Vec::len).collect();
    if lens != game.strategy_counts() {
        return Err(Error::Shape(format!(
            "payoff vector lengths {lens:?} do not match strategy counts {:?}",
            game.strategy_counts()
        )));
    }
    Ok(())
}

/// Mirror maps of every agent's payoff vector.
pub fn mirror_profile(regs: &[Regularizer], etas: &[f64], y: &[Vec<f64>]) -> Result<MixedProfile> {
    let x = y
        .iter()
        .zip(regs.iter().zip(etas))
        .map(|(yi, (reg, &eta))| reg.mirror_map(yi, eta))
        .collect::<Result<Vec<_>>>()?;
    Ok(MixedProfile::from_vecs_unchecked(x))
}

/// One simultaneous step of deterministic FTRL: every agent adds its expected
/// payoff vector against the opponents' current mixtures.
pub fn deterministic_step(
    game: &NetworkGame,
    regs: &[Regularizer],
    etas: &[f64],
    y_prev: &[Vec<f64>],
) -> Result<(DualProfile, MixedProfile)> {
    check_learners(game, regs, etas)?;
    check_dual(game, y_prev)?;
    let x_prev = mirror_profile(regs, etas, y_prev)?;
    let y_next: DualProfile = (0..game.num_agents())
        .map(|i| add(&y_prev[i], &game.payoff_against(i, x_prev.as_slices())))
        .collect();
    let x_next = mirror_profile(regs, etas, &y_next)?;
    Ok((y_next, x_next))
}

/// Deterministic MWU in multiplicative form,
/// `x_s <- x_s exp(eta u_s) / sum_k x_k exp(eta u_k)` with `u` the expected
/// payoff vector against the opponents' mixtures.
pub fn deterministic_mwu_step(
    game: &NetworkGame,
    x_prev: &MixedProfile,
    etas: &[f64],
) -> Result<MixedProfile> {
    game.check_profile_shape(x_prev)?;
    if !x_prev.is_fully_mixed() {
        return Err(Error::Domain(
            "deterministic MWU requires a fully mixed profile".into(),
        ));
    }
    let x = (0..game.num_agents())
        .map(|i| {
            let u = game.payoff_against(i, x_prev.as_slices());
            reweight(x_prev.agent(i), &u, etas[i])
        })
        .collect();
    Ok(MixedProfile::from_vecs_unchecked(x))
}

/// Independent inverse-CDF draw per agent. Rounding residue goes to the last
/// strategy with positive probability, so zero-probability strategies are
/// never drawn.
pub fn sample_profile<R: Rng + ?Sized>(x: &MixedProfile, rng: &mut R) -> PureProfile {
    PureProfile(
        x.as_slices()
            .iter()
            .map(|xi| {
                let u: f64 = rng.random();
                let mut cum = 0.0;
                let mut last_positive = 0;
                for (s, &p) in xi.iter().enumerate() {
                    if p > 0.0 {
                        last_positive = s;
                        cum += p;
                        if u < cum {
                            return s;
                        }
                    }
                }
                last_positive
            })
            .collect(),
    )
}

/// Stochastic FTRL update for a given realized profile: every agent adds the
/// payoff vector against the opponents' realized pure strategies.
pub fn stochastic_update(
    game: &NetworkGame,
    regs: &[Regularizer],
    etas: &[f64],
    y_prev: &[Vec<f64>],
    realized: &PureProfile,
) -> Result<(DualProfile, MixedProfile)> {
    check_learners(game, regs, etas)?;
    check_dual(game, y_prev)?;
    game.check_pure_shape(realized)?;
    let y_next: DualProfile = (0..game.num_agents())
        .map(|i| add(&y_prev[i], &game.payoff_against_pure(i, &realized.0)))
        .collect();
    let x_next = mirror_profile(regs, etas, &y_next)?;
    Ok((y_next, x_next))
}

/// One step of stochastic FTRL: sample one profile from the current mixtures
/// and feed the same realization to every agent.
pub fn stochastic_step<R: Rng + ?Sized>(
    game: &NetworkGame,
    regs: &[Regularizer],
    etas: &[f64],
    y_prev: &[Vec<f64>],
    rng: &mut R,
) -> Result<(DualProfile, MixedProfile, PureProfile)> {
    check_learners(game, regs, etas)?;
    let x_prev = mirror_profile(regs, etas, y_prev)?;
    let s = sample_profile(&x_prev, rng);
    let (y, x) = stochastic_update(game, regs, etas, y_prev, &s)?;
    Ok((y, x, s))
}

/// The stochastic MWU map `R(s, x)`: multiplicative reweighting against the
/// realized opponents' pure strategies. Zero weights stay zero, and an agent
/// whose weights all vanish keeps all-zero weights (`0/0 = 0`).
pub fn mwu_update(
    game: &NetworkGame,
    x: &MixedProfile,
    etas: &[f64],
    realized: &PureProfile,
) -> MixedProfile {
    let next = (0..game.num_agents())
        .map(|i| {
            let u = game.payoff_against_pure(i, &realized.0);
            reweight(x.agent(i), &u, etas[i])
        })
        .collect();
    MixedProfile::from_vecs_unchecked(next)
}

/// Samples a profile from `x_prev` and applies [`mwu_update`].
pub fn stochastic_mwu_step<R: Rng + ?Sized>(
    game: &NetworkGame,
    x_prev: &MixedProfile,
    etas: &[f64],
    rng: &mut R,
) -> Result<(MixedProfile, PureProfile)> {
    game.check_profile_shape(x_prev)?;
    if etas.len() != game.num_agents() {
        return Err(Error::Shape("one learning rate per agent required".into()));
    }
    let s = sample_profile(x_prev, rng);
    Ok((mwu_update(game, x_prev, etas, &s), s))
}

/// Closed form `exp(eta Y_s) / sum_k exp(eta Y_k)` on raw, unnormalized
/// cumulative payoffs (no max-subtraction).
pub fn mwu2_profile(y_raw: &[Vec<f64>], etas: &[f64]) -> MixedProfile {
    let x = y_raw
        .iter()
        .zip(etas)
        .map(|(y, &eta)| {
            let w: Vec<f64> = y.iter().map(|v| (eta * v).exp()).collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|v| v / s).collect()
        })
        .collect();
    MixedProfile::from_vecs_unchecked(x)
}

/// Exact expectation of the stochastic FTRL dual update from `y_prev` when the
/// current mixed profile is `x_prev`, by enumerating every pure profile.
///
/// Generic over the scalar so the check can run in rational arithmetic.
pub fn expected_stochastic_dual<T: Scalar>(
    game: &NetworkGame<T>,
    y_prev: &[Vec<T>],
    x_prev: &MixedProfile<T>,
) -> Result<Vec<Vec<T>>> {
    game.check_profile_shape(x_prev)?;
    let mut out: Vec<Vec<T>> = y_prev.to_vec();
    for s in game.pure_profiles() {
        let p =
            s.0.iter()
                .enumerate()
                .fold(T::one(), |acc, (i, &k)| acc * x_prev.agent(i)[k].clone());
        if p.is_zero() {
            continue;
        }
        for (i, yi) in out.iter_mut().enumerate() {
            for (v, u) in yi.iter_mut().zip(game.payoff_against_pure(i, &s.0)) {
                *v = v.clone() + p.clone() * u;
            }
        }
    }
    Ok(out)
}

/// The deterministic dual update `y_i + sum_j A^(ij) x_j` for a given mixed
/// profile, generic over the scalar.
pub fn deterministic_dual<T: Scalar>(
    game: &NetworkGame<T>,
    y_prev: &[Vec<T>],
    x_prev: &MixedProfile<T>,
) -> Result<Vec<Vec<T>>> {
    game.check_profile_shape(x_prev)?;
    Ok((0..game.num_agents())
        .map(|i| {
            y_prev[i]
                .iter()
                .zip(game.payoff_against(i, x_prev.as_slices()))
                .map(|(a, b)| a.clone() + b)
                .collect()
        })
        .collect())
}

fn reweight(x: &[f64], u: &[f64], eta: f64) -> Vec<f64> {
    let w: Vec<f64> = x.iter().zip(u).map(|(p, v)| p * (eta * v).exp()).collect();
    let s: f64 = w.iter().sum();
    if s == 0.0 {
        return vec![0.0; w.len()];
    }
    w.into_iter().map(|v| v / s).collect()
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}
