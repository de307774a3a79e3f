//! End-to-end drivers behind the `sftrl` binary. Each command reads a
//! [`RunConfig`], writes its files into the output directory and returns a
//! serializable summary. Outputs depend only on the configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::divergences::{fenchel_coupling, kl_divergence};
use crate::error::{Error, Result};
use crate::game::{
    random_zero_sum, solve_2p_zero_sum, EntryDistribution, MixedProfile, NetworkGame,
};
use crate::io::{self, DistanceRecord, DivergenceRow, LoadedGame};
use crate::learning::{run, DynamicsConfig, Mode, Regularizer, Trajectory};
use crate::markov::{
    check_irreducible, empirical_occupation, enumerate_states, pure_stationarity_check,
    pure_vertices, return_time_samples, DualState, IrreducibilityReport, Region,
    StationarityReport,
};
use crate::metrics::{
    distance_to_closest_pure, estimate_alpha, external_regret, occupancy_heatmap,
    run_experiment_suite, time_average, Coordinate, RegressionFit, RegretBenchmark, SuiteReport,
    SuiteSpec, DEFAULT_BINS, DEFAULT_BURN_IN,
};
use crate::numeric::{rationalize, Rational};

pub const DEFAULT_ETA: f64 = 0.1;
pub const DEFAULT_STEPS: usize = 1000;
pub const DEFAULT_DELTA: f64 = 0.2;
pub const DEFAULT_T_MAX: usize = 4;
pub const DEFAULT_STATE_CAP: usize = 100_000;

/// Settings shared by the commands. Every field is optional so a config file
/// and command-line flags can be layered with [`RunConfig::overridden_by`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Game file.
    pub game: Option<PathBuf>,
    /// Strategy count of a random two-agent zero-sum game drawn from `seed`.
    pub generate: Option<usize>,
    pub eta: Option<f64>,
    /// Alternative to `eta`, with `eta = ln(1 + epsilon)`.
    pub epsilon: Option<f64>,
    pub steps: Option<usize>,
    pub seed: Option<u64>,
    pub regularizer: Option<Regularizer>,
    pub mode: Option<Mode>,
    pub out: Option<PathBuf>,
    /// Interior box `x >= delta` used for occupation statistics.
    pub delta: Option<f64>,
    pub bins: Option<usize>,
    /// Trajectory JSON read by `analyze`.
    pub trajectory: Option<PathBuf>,
    /// Agent whose regret `analyze` reports, numbered from 1.
    pub agent: Option<usize>,
    pub burn_in: Option<usize>,
    pub window: Option<usize>,
    pub benchmark: Option<RegretBenchmark>,
    pub t_max: Option<usize>,
    pub state_cap: Option<usize>,
    /// Denominator used to turn a float game into an exact one.
    pub rationalize: Option<u64>,
}

impl RunConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `flags` replace those in `self`. Setting either of
    /// `eta`/`epsilon` in `flags` discards both from `self`, and likewise for
    /// `game`/`generate`.
    pub fn overridden_by(mut self, flags: RunConfig) -> RunConfig {
        if flags.eta.is_some() || flags.epsilon.is_some() {
            self.eta = None;
            self.epsilon = None;
        }
        if flags.game.is_some() || flags.generate.is_some() {
            self.game = None;
            self.generate = None;
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if flags.$f.is_some() { self.$f = flags.$f; } )* };
        }
        take!(
            game,
            generate,
            eta,
            epsilon,
            steps,
            seed,
            regularizer,
            mode,
            out,
            delta,
            bins,
            trajectory,
            agent,
            burn_in,
            window,
            benchmark,
            t_max,
            state_cap,
            rationalize
        );
        self
    }

    pub fn eta(&self) -> Result<f64> {
        let eta = match (self.eta, self.epsilon) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("give either eta or epsilon, not both".into()))
            }
            (Some(eta), None) => eta,
            (None, Some(eps)) => (1.0 + eps).ln(),
            (None, None) => DEFAULT_ETA,
        };
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {eta}"
            )));
        }
        Ok(eta)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    fn delta(&self) -> Result<f64> {
        let d = self.delta.unwrap_or(DEFAULT_DELTA);
        if !(0.0..=1.0).contains(&d) {
            return Err(Error::Config(format!("delta must lie in [0, 1], got {d}")));
        }
        Ok(d)
    }

    pub fn load_game(&self) -> Result<LoadedGame> {
        match (&self.game, self.generate) {
            (Some(path), None) => io::read_game(path),
            (None, Some(n)) => {
                if n == 0 {
                    return Err(Error::Config(
                        "generated games need at least one strategy".into(),
                    ));
                }
                let game = random_zero_sum(n, self.seed(), &EntryDistribution::default())?;
                Ok(LoadedGame::Float {
                    game,
                    equilibrium: None,
                })
            }
            (None, None) => Err(Error::Config(
                "no game given: use a game file or a generator".into(),
            )),
            (Some(_), Some(_)) => Err(Error::Config(
                "give either a game file or a generator, not both".into(),
            )),
        }
    }

    fn dynamics(&self, game: &NetworkGame) -> Result<DynamicsConfig> {
        Ok(DynamicsConfig::uniform(
            game.num_agents(),
            self.eta()?,
            self.regularizer.unwrap_or(Regularizer::Entropy),
            self.steps.unwrap_or(DEFAULT_STEPS),
            self.seed(),
        ))
    }
}

/// Process exit status for an error: 2 for configuration problems, 3 for
/// bad or unreadable input data.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::SizeLimit(_) => 2,
        _ => 3,
    }
}

fn prepare_out(cfg: &RunConfig) -> Result<PathBuf> {
    let out = cfg.out_dir();
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    Ok(out)
}

/// The file's equilibrium, or for two-agent games a solver equilibrium.
fn equilibrium_for(loaded: &LoadedGame) -> Result<Option<MixedProfile>> {
    let (game, eq) = loaded.to_f64();
    if eq.is_some() {
        return Ok(eq);
    }
    match loaded {
        LoadedGame::Rational { game, .. } if game.num_agents() == 2 => {
            Ok(solve_pair(game).ok().map(|s| s.to_f64()))
        }
        LoadedGame::Float { .. } if game.num_agents() == 2 => Ok(solve_pair(&game).ok()),
        _ => Ok(None),
    }
}

fn solve_pair<T: crate::numeric::Scalar>(game: &NetworkGame<T>) -> Result<MixedProfile<T>> {
    let a = game
        .payoff_matrix(0, 1)
        .ok_or_else(|| Error::Data("agents 1 and 2 do not interact".into()))?;
    Ok(solve_2p_zero_sum(a)?.profile)
}

/// `(t, D_KL(x*||x^t), F(x*, y^t))` for `t = 0..=T`.
pub fn divergence_rows(
    trajectory: &Trajectory,
    x_star: &MixedProfile,
) -> Result<Vec<DivergenceRow>> {
    let regs = &trajectory.config.regularizers;
    let etas = &trajectory.config.etas;
    (0..=trajectory.horizon())
        .map(|t| {
            let y = if t == 0 {
                &trajectory.initial.y
            } else {
                &trajectory.steps[t - 1].y
            };
            let kl = kl_divergence(x_star, trajectory.profile(t))?;
            let f = fenchel_coupling(regs, x_star, y, etas)?;
            Ok(DivergenceRow {
                t,
                kl: kl.total,
                fenchel: f.total,
                kl_terms: kl.per_agent,
                fenchel_terms: f.per_agent,
            })
        })
        .collect()
}

pub fn distance_rows(trajectory: &Trajectory) -> Vec<DistanceRecord> {
    (0..=trajectory.horizon())
        .map(|t| DistanceRecord {
            t,
            distance: distance_to_closest_pure(trajectory.profile(t)),
        })
        .collect()
}

/// Heatmap axes: the first strategy of the first two agents with at least
/// two strategies, or the first two strategies of a lone agent.
fn heatmap_axes(counts: &[usize]) -> Option<(Coordinate, Coordinate)> {
    let multi: Vec<usize> = (0..counts.len()).filter(|&i| counts[i] >= 2).collect();
    match multi.as_slice() {
        [] => None,
        [a] => (counts[*a] >= 3).then_some((
            Coordinate {
                agent: *a,
                strategy: 0,
            },
            Coordinate {
                agent: *a,
                strategy: 1,
            },
        )),
        [a, b, ..] => Some((
            Coordinate {
                agent: *a,
                strategy: 0,
            },
            Coordinate {
                agent: *b,
                strategy: 0,
            },
        )),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulateSummary {
    pub mode: Mode,
    pub eta: f64,
    pub steps: usize,
    pub final_profile: MixedProfile,
    pub final_kl: Option<f64>,
    pub final_distance_to_pure: f64,
    /// Fraction of `x^0, ..., x^T` outside the interior box.
    pub boundary_proportion: f64,
    pub files: Vec<String>,
}

/// Runs the dynamics and writes `trajectory.csv`, `trajectory.json`,
/// `distance.csv`, `heatmap.csv`, `divergence.csv` (when an equilibrium is
/// known) and `summary.json`.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<SimulateSummary> {
    let loaded = cfg.load_game()?;
    let (game, _) = loaded.to_f64();
    let dynamics = cfg.dynamics(&game)?;
    let mode = cfg.mode.unwrap_or(Mode::Stochastic);
    let delta = cfg.delta()?;
    let bins = cfg.bins.unwrap_or(DEFAULT_BINS);
    let x_star = equilibrium_for(&loaded)?;
    let out = prepare_out(cfg)?;

    let trajectory = run(&game, &dynamics, mode)?;
    let mut files = vec!["trajectory.csv", "trajectory.json", "distance.csv"];
    io::write_trajectory_csv(out.join("trajectory.csv"), &trajectory)?;
    io::write_trajectory_json(out.join("trajectory.json"), &trajectory)?;
    let distances = distance_rows(&trajectory);
    io::write_distance_csv(out.join("distance.csv"), &distances)?;
    if let Some((a, b)) = heatmap_axes(game.strategy_counts()) {
        let heat = occupancy_heatmap(&trajectory, a, b, bins)?;
        io::write_heatmap_csv(out.join("heatmap.csv"), &heat)?;
        files.push("heatmap.csv");
    }
    let final_kl = match &x_star {
        Some(x) => {
            let rows = divergence_rows(&trajectory, x)?;
            io::write_divergence_csv(out.join("divergence.csv"), &rows)?;
            files.push("divergence.csv");
            rows.last().map(|r| r.kl)
        }
        None => None,
    };
    let region = Region::InteriorBox { delta };
    let outside = (0..=trajectory.horizon())
        .filter(|&t| !region.contains(trajectory.profile(t)))
        .count();
    files.push("summary.json");
    let summary = SimulateSummary {
        mode,
        eta: dynamics.etas[0],
        steps: trajectory.horizon(),
        final_profile: trajectory.profile(trajectory.horizon()).clone(),
        final_kl,
        final_distance_to_pure: distances.last().map_or(0.0, |d| d.distance),
        boundary_proportion: outside as f64 / (trajectory.horizon() + 1) as f64,
        files: files.into_iter().map(String::from).collect(),
    };
    io::write_json(out.join("summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyzeSummary {
    pub steps: usize,
    /// Numbered from 1.
    pub agent: usize,
    pub benchmark: RegretBenchmark,
    pub final_regret: Option<f64>,
    pub fit: Option<RegressionFit>,
    pub time_average: Option<MixedProfile>,
    pub occupation: f64,
    pub return_time_mean: Option<f64>,
    pub files: Vec<String>,
}

/// Reads a trajectory JSON and writes `regret.csv`, `distance.csv`,
/// `occupation.csv`, `return_times.csv`, `heatmap.csv` and `analysis.json`.
/// The regret fit is omitted when too few positive points remain.
pub fn cmd_analyze(cfg: &RunConfig) -> Result<AnalyzeSummary> {
    let path = cfg
        .trajectory
        .as_ref()
        .ok_or_else(|| Error::Config("analyze needs a trajectory file".into()))?;
    let trajectory = io::read_trajectory_json(path)?;
    let (game, _) = cfg.load_game()?.to_f64();
    if game.strategy_counts()
        != trajectory
            .initial
            .x
            .as_slices()
            .iter()
            .map(Vec::len)
            .collect::<Vec<_>>()
    {
        return Err(Error::Data(
            "trajectory does not match the game's strategy counts".into(),
        ));
    }
    let agent = match cfg.agent.unwrap_or(1) {
        0 => return Err(Error::Config("agents are numbered from 1".into())),
        a => a - 1,
    };
    let benchmark = cfg.benchmark.unwrap_or_default();
    let region = Region::InteriorBox {
        delta: cfg.delta()?,
    };
    let out = prepare_out(cfg)?;
    let mut files = vec!["distance.csv", "occupation.csv", "return_times.csv"];

    io::write_distance_csv(out.join("distance.csv"), &distance_rows(&trajectory))?;
    let occupation = if trajectory.horizon() > 0 {
        empirical_occupation(&trajectory, &region, cfg.window)?
    } else {
        empirical_occupation(&trajectory, &Region::Everything, cfg.window)?
    };
    io::write_occupation_csv(out.join("occupation.csv"), &occupation.windows)?;
    let returns = return_time_samples(&trajectory, &region);
    io::write_return_times_csv(out.join("return_times.csv"), &returns)?;
    if let Some((a, b)) = heatmap_axes(game.strategy_counts()) {
        let heat = occupancy_heatmap(&trajectory, a, b, cfg.bins.unwrap_or(DEFAULT_BINS))?;
        io::write_heatmap_csv(out.join("heatmap.csv"), &heat)?;
        files.push("heatmap.csv");
    }
    let (final_regret, fit) = if trajectory.horizon() > 0 {
        let series = external_regret(&game, &trajectory, agent, benchmark)?;
        io::write_regret_csv(out.join("regret.csv"), &series)?;
        files.push("regret.csv");
        let fit = match estimate_alpha(&series, cfg.burn_in.unwrap_or(DEFAULT_BURN_IN)) {
            Ok(fit) => Some(fit),
            Err(Error::InsufficientData(_)) => None,
            Err(e) => return Err(e),
        };
        (series.running_max.last().copied(), fit)
    } else {
        (None, None)
    };
    files.push("analysis.json");
    let summary = AnalyzeSummary {
        steps: trajectory.horizon(),
        agent: agent + 1,
        benchmark,
        final_regret,
        fit,
        time_average: time_average(&trajectory)
            .ok()
            .and_then(|v| v.last().cloned()),
        occupation: occupation.proportion,
        return_time_mean: returns.mean_uncensored,
        files: files.into_iter().map(String::from).collect(),
    };
    io::write_json(out.join("analysis.json"), &summary)?;
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarkovSummary {
    pub t_max: usize,
    pub states: usize,
    pub truncated: bool,
    pub irreducible_on_subgraph: bool,
    pub irreducibility: IrreducibilityReport,
    pub stationarity: StationarityReport,
    pub files: Vec<String>,
}

/// Exact Markov-chain checks. Needs an exact game with an equilibrium; float
/// games are accepted only with a rationalization denominator.
pub fn cmd_markov(cfg: &RunConfig) -> Result<MarkovSummary> {
    let loaded = cfg.load_game()?;
    let (game, x_star) = match (loaded, cfg.rationalize) {
        (LoadedGame::Rational { game, equilibrium }, _) => (game, equilibrium),
        (LoadedGame::Float { game, equilibrium }, Some(d)) => {
            let eq = equilibrium
                .map(|x| {
                    let rows = x
                        .as_slices()
                        .iter()
                        .map(|r| r.iter().map(|&v| rationalize(v, d)).collect::<Result<Vec<Rational>>>())
                        .collect::<Result<Vec<_>>>()?;
                    MixedProfile::new(rows).map_err(|e| {
                        Error::Data(format!("equilibrium does not survive rationalization with denominator {d}: {e}"))
                    })
                })
                .transpose()?;
            let exact = game.rationalize(d)?;
            let report = exact.validate_zero_sum();
            if !report.is_valid() {
                return Err(Error::NotZeroSum(report.max_deviation));
            }
            (exact, eq)
        }
        (LoadedGame::Float { .. }, None) => return Err(Error::Config(
            "the Markov checks need exact payoffs: write entries as \"p/q\" strings or integers, \
                 or pass a rationalization denominator (--rationalize DENOM)"
                .into(),
        )),
    };
    let x_star = x_star.ok_or_else(|| {
        Error::Data(
            "game file has no \"equilibrium\" field; the Markov checks need an exact equilibrium"
                .into(),
        )
    })?;
    let t_max = cfg.t_max.unwrap_or(DEFAULT_T_MAX);
    let cap = cfg.state_cap.unwrap_or(DEFAULT_STATE_CAP);
    let eta = cfg.eta()?;
    let n = game.num_agents();
    let regs = vec![cfg.regularizer.unwrap_or(Regularizer::Entropy); n];
    let etas = vec![eta; n];
    let out = prepare_out(cfg)?;

    let origin = DualState::zero(game.strategy_counts());
    let graph = enumerate_states(&game, &origin, t_max, cap)?;
    let irreducibility = check_irreducible(&graph, &game, &regs, &etas, &origin, &x_star)?;
    let float_game = game.to_f64();
    let stationarity = pure_stationarity_check(&float_game, &etas, &pure_vertices(&float_game))?;
    io::write_state_graph(out.join("state_graph.json"), &graph)?;
    io::write_json(out.join("irreducibility.json"), &irreducibility)?;
    io::write_json(out.join("stationarity.json"), &stationarity)?;
    let summary = MarkovSummary {
        t_max,
        states: graph.len(),
        truncated: graph.truncated,
        irreducible_on_subgraph: irreducibility.is_irreducible(),
        irreducibility,
        stationarity,
        files: [
            "state_graph.json",
            "irreducibility.json",
            "stationarity.json",
            "markov.json",
        ]
        .map(String::from)
        .to_vec(),
    };
    io::write_json(out.join("markov.json"), &summary)?;
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveSummary {
    pub exact: bool,
    /// Agent 1's equilibrium payoff, as `"p/q"` for exact games.
    pub value: String,
    pub profile: MixedProfile,
    pub file: String,
}

/// Solves a two-agent game and writes it back, with its equilibrium, to
/// `game_with_equilibrium.json`. Exact games are solved exactly.
pub fn cmd_solve_nash(cfg: &RunConfig) -> Result<SolveSummary> {
    let loaded = cfg.load_game()?;
    let counts = loaded.to_f64().0.num_agents();
    if counts != 2 {
        return Err(Error::Data(format!(
            "the solver handles two-agent games, got {counts} agents"
        )));
    }
    let out = prepare_out(cfg)?;
    let file = "game_with_equilibrium.json";
    let summary = match &loaded {
        LoadedGame::Rational { game, .. } => {
            let a = game
                .payoff_matrix(0, 1)
                .ok_or_else(|| Error::Data("agents do not interact".into()))?;
            let sol = solve_2p_zero_sum(a)?;
            io::write_game(
                out.join(file),
                &io::rational_game_file(game, Some(&sol.profile)),
            )?;
            SolveSummary {
                exact: true,
                value: crate::numeric::format_rational(&sol.value),
                profile: sol.profile.to_f64(),
                file: file.into(),
            }
        }
        LoadedGame::Float { game, .. } => {
            let a = game
                .payoff_matrix(0, 1)
                .ok_or_else(|| Error::Data("agents do not interact".into()))?;
            let sol = solve_2p_zero_sum(a)?;
            io::write_game(out.join(file), &io::game_file(game, Some(&sol.profile)))?;
            SolveSummary {
                exact: false,
                value: sol.value.to_string(),
                profile: sol.profile,
                file: file.into(),
            }
        }
    };
    Ok(summary)
}

/// Runs the regret-growth suite and writes `runs.csv` and `summary.csv`.
pub fn cmd_experiment(spec: &SuiteSpec, out: &Path) -> Result<SuiteReport> {
    if spec.strategy_counts.is_empty() || spec.repetitions == 0 {
        return Err(Error::Config(
            "experiment needs at least one strategy count and repetition".into(),
        ));
    }
    if spec.strategy_counts.contains(&0) {
        return Err(Error::Config("strategy counts must be positive".into()));
    }
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let report = run_experiment_suite(spec)?;
    io::write_runs_csv(out.join("runs.csv"), &report.runs)?;
    io::write_summary_csv(out.join("summary.csv"), &report.summary)?;
    Ok(report)
}
