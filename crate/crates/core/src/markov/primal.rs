use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{MixedProfile, NetworkGame, PureProfile};
use crate::learning::mwu_update;

/// One-step kernel of stochastic MWU in strategy space.
///
/// Enumerates the pure profiles with positive probability, applies the
/// multiplicative update against each (zero weights stay zero), and merges
/// profiles that land on the same point.
pub fn primal_kernel(
    game: &NetworkGame,
    x: &MixedProfile,
    etas: &[f64],
) -> Result<Vec<(MixedProfile, f64)>> {
    game.check_profile_shape(x)?;
    if etas.len() != game.num_agents() {
        return Err(Error::Shape("one learning rate per agent required".into()));
    }
    let mut out: Vec<(MixedProfile, f64)> = Vec::new();
    for s in game.pure_profiles() {
        let p: f64 =
            s.0.iter()
                .enumerate()
                .map(|(i, &k)| x.agent(i)[k])
                .product();
        if p == 0.0 {
            continue;
        }
        let next = mwu_update(game, x, etas, &s);
        match out.iter_mut().find(|(y, _)| *y == next) {
            Some(entry) => entry.1 += p,
            None => out.push((next, p)),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StationarityReport {
    pub points: Vec<PureProfile>,
    /// Points whose kernel is not the point mass on themselves.
    pub failures: Vec<PureProfile>,
}

impl StationarityReport {
    pub fn all_stationary(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that every given vertex maps to itself with probability exactly 1.
pub fn pure_stationarity_check(
    game: &NetworkGame,
    etas: &[f64],
    points: &[MixedProfile],
) -> Result<StationarityReport> {
    let mut report = StationarityReport {
        points: Vec::with_capacity(points.len()),
        failures: Vec::new(),
    };
    for x in points {
        let s = x
            .as_pure()
            .ok_or_else(|| Error::Domain(format!("{:?} is not a pure profile", x.as_slices())))?;
        let kernel = primal_kernel(game, x, etas)?;
        if !(kernel.len() == 1 && kernel[0].0 == *x && kernel[0].1 == 1.0) {
            report.failures.push(s.clone());
        }
        report.points.push(s);
    }
    Ok(report)
}

/// Every vertex of the strategy space, in lexicographic profile order.
pub fn pure_vertices(game: &NetworkGame) -> Vec<MixedProfile> {
    game.pure_profiles()
        .map(|s| MixedProfile::from_pure(&s, game.strategy_counts()))
        .collect()
}
