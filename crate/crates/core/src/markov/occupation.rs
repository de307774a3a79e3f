use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::MixedProfile;
use crate::learning::Trajectory;

pub const DEFAULT_WINDOW: usize = 500;

/// A set of mixed profiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    /// Profiles with every coordinate at least `delta`.
    InteriorBox { delta: f64 },
    /// Profiles within Euclidean distance `radius` of `center`.
    Ball { center: MixedProfile, radius: f64 },
    /// The whole strategy space.
    Everything,
}

impl Region {
    pub fn contains(&self, x: &MixedProfile) -> bool {
        match self {
            Region::InteriorBox { delta } => x.as_slices().iter().flatten().all(|v| v >= delta),
            Region::Ball { center, radius } => {
                let d2: f64 = center
                    .as_slices()
                    .iter()
                    .flatten()
                    .zip(x.as_slices().iter().flatten())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                d2.sqrt() <= *radius
            }
            Region::Everything => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowOccupation {
    /// First time index in the window.
    pub start: usize,
    /// One past the last time index.
    pub end: usize,
    pub inside: usize,
    pub proportion: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OccupationStats {
    /// Iterates examined: `x^0, ..., x^{T-1}`.
    pub total: usize,
    pub inside: usize,
    pub proportion: f64,
    pub windows: Vec<WindowOccupation>,
}

/// Fraction of `x^0, ..., x^{T-1}` inside `region`, overall and per window of
/// `window` steps (the last window may be shorter).
pub fn empirical_occupation(
    trajectory: &Trajectory,
    region: &Region,
    window: Option<usize>,
) -> Result<OccupationStats> {
    let window = window.unwrap_or(DEFAULT_WINDOW);
    if window == 0 {
        return Err(Error::Config("occupation window must be positive".into()));
    }
    let flags: Vec<bool> = (0..trajectory.horizon())
        .map(|t| region.contains(trajectory.profile(t)))
        .collect();
    let count = |r: &[bool]| r.iter().filter(|&&b| b).count();
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let windows = flags
        .chunks(window)
        .enumerate()
        .map(|(k, c)| {
            let inside = count(c);
            WindowOccupation {
                start: k * window,
                end: k * window + c.len(),
                inside,
                proportion: ratio(inside, c.len()),
            }
        })
        .collect();
    let inside = count(&flags);
    Ok(OccupationStats {
        total: flags.len(),
        inside,
        proportion: ratio(inside, flags.len()),
        windows,
    })
}

/// Fraction of `x^t`, `start <= t < end`, inside `region`.
pub fn occupation_between(
    trajectory: &Trajectory,
    region: &Region,
    start: usize,
    end: usize,
) -> Result<f64> {
    if start >= end || end > trajectory.horizon() + 1 {
        return Err(Error::Config(format!(
            "window [{start}, {end}) outside 0..={}",
            trajectory.horizon()
        )));
    }
    let inside = (start..end)
        .filter(|&t| region.contains(trajectory.profile(t)))
        .count();
    Ok(inside as f64 / (end - start) as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReturnTimes {
    /// Steps from each exit until re-entry.
    pub samples: Vec<usize>,
    /// Steps spent outside after the final exit when the run ends outside.
    pub censored: Option<usize>,
    pub mean_uncensored: Option<f64>,
}

/// Return times to `region` over `x^0, ..., x^T`. An exit happens at the
/// first `t` with `x^{t-1}` inside and `x^t` outside; the sample is the number
/// of steps until the next `t'` with `x^{t'}` inside.
pub fn return_time_samples(trajectory: &Trajectory, region: &Region) -> ReturnTimes {
    let mut samples = Vec::new();
    let mut exited_at: Option<usize> = None;
    let mut prev_inside = region.contains(trajectory.profile(0));
    for t in 1..=trajectory.horizon() {
        let inside = region.contains(trajectory.profile(t));
        match (prev_inside, inside, exited_at) {
            (true, false, _) => exited_at = Some(t),
            (false, true, Some(e)) => {
                samples.push(t - e);
                exited_at = None;
            }
            _ => {}
        }
        prev_inside = inside;
    }
    let censored = exited_at.map(|e| trajectory.horizon() + 1 - e);
    let mean_uncensored =
        (!samples.is_empty()).then(|| samples.iter().sum::<usize>() as f64 / samples.len() as f64);
    ReturnTimes {
        samples,
        censored,
        mean_uncensored,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::NetworkGame;
    use crate::learning::{run, DynamicsConfig, InitialState, Mode, Regularizer, State, Step};

    fn scripted(points: &[f64]) -> Trajectory {
        let prof = |p: f64| MixedProfile::new(vec![vec![p, 1.0 - p]]).unwrap();
        let cfg = DynamicsConfig::uniform(1, 1.0, Regularizer::Entropy, points.len() - 1, 0);
        Trajectory {
            mode: Mode::Deterministic,
            config: cfg,
            initial: State {
                y: vec![vec![0.0, 0.0]],
                x: prof(points[0]),
            },
            steps: points[1..]
                .iter()
                .map(|&p| Step {
                    y: vec![vec![0.0, 0.0]],
                    x: prof(p),
                    realized: None,
                })
                .collect(),
        }
    }

    #[test]
    fn constant_interior_trajectory() {
        let tr = scripted(&[0.5; 20]);
        let r = Region::InteriorBox { delta: 0.2 };
        let s = empirical_occupation(&tr, &r, Some(5)).unwrap();
        assert_eq!(s.proportion, 1.0);
        assert_eq!(s.total, 19);
        assert_eq!(s.windows.len(), 4);
        assert_eq!(
            empirical_occupation(&tr, &Region::Everything, None)
                .unwrap()
                .proportion,
            1.0
        );
        assert!(return_time_samples(&tr, &r).samples.is_empty());
    }

    #[test]
    fn alternating_trajectory_returns_in_one_step() {
        let tr = scripted(&[0.5, 0.05, 0.5, 0.05, 0.5, 0.05, 0.5]);
        let rt = return_time_samples(&tr, &Region::InteriorBox { delta: 0.2 });
        assert_eq!(rt.samples, vec![1, 1, 1]);
        assert_eq!(rt.censored, None);
        assert_eq!(rt.mean_uncensored, Some(1.0));
    }

    #[test]
    fn censoring_is_reported() {
        let tr = scripted(&[0.5, 0.05, 0.05, 0.5, 0.01, 0.01, 0.01]);
        let rt = return_time_samples(&tr, &Region::InteriorBox { delta: 0.2 });
        assert_eq!(rt.samples, vec![2]);
        assert_eq!(rt.censored, Some(3));
    }

    #[test]
    fn ball_region() {
        let c = MixedProfile::new(vec![vec![0.5, 0.5]]).unwrap();
        let r = Region::Ball {
            center: c,
            radius: 0.1,
        };
        let tr = scripted(&[0.5, 0.55, 0.9]);
        assert!(r.contains(tr.profile(1)));
        assert!(!r.contains(tr.profile(2)));
    }

    #[test]
    fn stochastic_mwu_leaves_the_box() {
        let g = NetworkGame::matching_pennies();
        let cfg = DynamicsConfig::uniform(2, 1.1f64.ln(), Regularizer::Entropy, 3000, 11)
            .with_initial(InitialState::Mixed(MixedProfile::uniform(&[2, 2])));
        let tr = run(&g, &cfg, Mode::Stochastic).unwrap();
        let s = empirical_occupation(&tr, &Region::InteriorBox { delta: 0.2 }, None).unwrap();
        assert_eq!(s.windows.len(), 6);
        assert!(s.windows[5].proportion < s.windows[0].proportion);
    }
}
