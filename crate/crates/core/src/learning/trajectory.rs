use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dynamics::{deterministic_step, mirror_profile, stochastic_step, DualProfile};
use super::{inverse_map_entropy, Regularizer};
use crate::error::{Error, Result};
use crate::game::{MixedProfile, NetworkGame, PureProfile};

/// Where the dynamics start.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum InitialState {
    /// All payoff vectors zero, hence uniform mixed strategies.
    #[default]
    Zero,
    Dual(DualProfile),
    /// Mapped back to the dual space: `inverse_map_entropy` for entropy
    /// agents, `x / eta` for squared-Euclidean agents.
    Mixed(MixedProfile),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicsConfig {
    pub etas: Vec<f64>,
    pub regularizers: Vec<Regularizer>,
    pub horizon: usize,
    pub seed: u64,
    #[serde(default)]
    pub initial: InitialState,
}

impl DynamicsConfig {
    /// Same learning rate and regularizer for each of `agents` agents.
    pub fn uniform(agents: usize, eta: f64, reg: Regularizer, horizon: usize, seed: u64) -> Self {
        DynamicsConfig {
            etas: vec![eta; agents],
            regularizers: vec![reg; agents],
            horizon,
            seed,
            initial: InitialState::Zero,
        }
    }

    pub fn with_initial(mut self, initial: InitialState) -> Self {
        self.initial = initial;
        self
    }

    /// Checks rates and regularizers against the game and returns `y^0`.
    pub fn initial_dual(&self, game: &NetworkGame) -> Result<DualProfile> {
        let n = game.num_agents();
        if self.etas.len() != n || self.regularizers.len() != n {
            return Err(Error::Config(format!(
                "{n} agents but {} learning rates and {} regularizers",
                self.etas.len(),
                self.regularizers.len()
            )));
        }
        if let Some(eta) = self.etas.iter().find(|&&e| !(e.is_finite() && e > 0.0)) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {eta}"
            )));
        }
        let counts = game.strategy_counts();
        match &self.initial {
            InitialState::Zero => Ok(counts.iter().map(|&k| vec![0.0; k]).collect()),
            InitialState::Dual(y) => {
                let lens: Vec<usize> = y.iter().map(Vec::len).collect();
                if lens != counts {
                    return Err(Error::Shape(format!(
                        "initial payoff vectors have lengths {lens:?}, game has {counts:?}"
                    )));
                }
                Ok(y.clone())
            }
            InitialState::Mixed(x) => {
                game.check_profile_shape(x)?;
                (0..n)
                    .map(|i| match self.regularizers[i] {
                        Regularizer::Entropy => inverse_map_entropy(x.agent(i), self.etas[i])
                            .map_err(|_| {
                                Error::Config(format!(
                                    "agent {i}: entropy dynamics need a fully mixed initial strategy"
                                ))
                            }),
                        Regularizer::SquaredEuclidean => {
                            Ok(x.agent(i).iter().map(|v| v / self.etas[i]).collect())
                        }
                    })
                    .collect()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Deterministic,
    Stochastic,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "det" | "deterministic" => Ok(Mode::Deterministic),
            "stoch" | "stochastic" => Ok(Mode::Stochastic),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub y: DualProfile,
    pub x: MixedProfile,
}

/// Step `t`: the state after the update, plus the realized profile (drawn
/// from `x^{t-1}`) that produced it in stochastic mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub y: DualProfile,
    pub x: MixedProfile,
    pub realized: Option<PureProfile>,
}

/// A recorded run. `steps[t - 1]` holds time `t`; the horizon is `steps.len()`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub mode: Mode,
    pub config: DynamicsConfig,
    pub initial: State,
    pub steps: Vec<Step>,
}

impl Trajectory {
    pub fn horizon(&self) -> usize {
        self.steps.len()
    }

    /// `x^t` for `t = 0..=T`.
    pub fn profile(&self, t: usize) -> &MixedProfile {
        if t == 0 {
            &self.initial.x
        } else {
            &self.steps[t - 1].x
        }
    }

    /// `x^1, ..., x^T`.
    pub fn profiles(&self) -> impl Iterator<Item = &MixedProfile> + '_ {
        self.steps.iter().map(|s| &s.x)
    }

    pub fn num_agents(&self) -> usize {
        self.initial.x.num_agents()
    }
}

/// Runs `config.horizon` steps. Stochastic runs draw from a ChaCha8 stream
/// seeded by `config.seed`, so equal configs give equal trajectories.
pub fn run(game: &NetworkGame, config: &DynamicsConfig, mode: Mode) -> Result<Trajectory> {
    let y0 = config.initial_dual(game)?;
    let regs = &config.regularizers;
    let etas = &config.etas;
    let x0 = mirror_profile(regs, etas, &y0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut steps = Vec::with_capacity(config.horizon);
    let mut y = y0.clone();
    for _ in 0..config.horizon {
        let step = match mode {
            Mode::Deterministic => {
                let (y_next, x) = deterministic_step(game, regs, etas, &y)?;
                Step {
                    y: y_next,
                    x,
                    realized: None,
                }
            }
            Mode::Stochastic => {
                let (y_next, x, s) = stochastic_step(game, regs, etas, &y, &mut rng)?;
                Step {
                    y: y_next,
                    x,
                    realized: Some(s),
                }
            }
        };
        y.clone_from(&step.y);
        steps.push(step);
    }
    Ok(Trajectory {
        mode,
        config: config.clone(),
        initial: State { y: y0, x: x0 },
        steps,
    })
}
