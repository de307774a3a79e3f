use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use stochastic_ftrl::commands::{self, exit_code, RunConfig};
use stochastic_ftrl::learning::{Mode, Regularizer};
use stochastic_ftrl::metrics::{RegretBenchmark, SuiteSpec};
use stochastic_ftrl::{Error, Result};

/// Stochastic FTRL and MWU dynamics on network zero-sum games.
#[derive(Parser)]
#[command(name = "sftrl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the dynamics and export trajectory, divergence, distance and heatmap data.
    Simulate(Common),
    /// Regret, occupation and return-time analytics for a saved trajectory.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Trajectory JSON written by `simulate`.
        #[arg(long)]
        trajectory: Option<PathBuf>,
        /// Agent whose regret is computed (1-based).
        #[arg(long)]
        agent: Option<usize>,
        #[arg(long)]
        burn_in: Option<usize>,
        #[arg(long)]
        window: Option<usize>,
        /// `realized` or `expected` opponent play.
        #[arg(long)]
        benchmark: Option<RegretBenchmark>,
    },
    /// Enumerate the exact dual chain and check irreducibility and pure stationarity.
    Markov {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t_max: Option<usize>,
        #[arg(long)]
        state_cap: Option<usize>,
        /// Round a float game to multiples of 1/DENOM.
        #[arg(long, value_name = "DENOM")]
        rationalize: Option<u64>,
    },
    /// Solve a two-agent game and write it back with its equilibrium.
    SolveNash(Common),
    /// Regret-growth suite over random games.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct Common {
    /// JSON config file; flags take precedence over its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, conflicts_with = "generate")]
    game: Option<PathBuf>,
    /// Random two-agent zero-sum game with N strategies per agent.
    #[arg(long, value_name = "N")]
    generate: Option<usize>,
    #[arg(long, conflicts_with = "epsilon")]
    eta: Option<f64>,
    /// Sets eta = ln(1 + epsilon).
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// `entropy` or `euclidean`.
    #[arg(long)]
    regularizer: Option<Regularizer>,
    /// `det` or `stoch`.
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Interior box `x >= delta` for occupation statistics.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    bins: Option<usize>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Suite spec JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Strategy count; replaces the spec's list.
    #[arg(long, value_name = "N")]
    generate: Option<usize>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, conflicts_with = "epsilon")]
    eta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    benchmark: Option<RegretBenchmark>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl Common {
    fn into_config(self, extra: RunConfig) -> Result<RunConfig> {
        let base = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            game: self.game,
            generate: self.generate,
            eta: self.eta,
            epsilon: self.epsilon,
            steps: self.steps,
            seed: self.seed,
            regularizer: self.regularizer,
            mode: self.mode,
            out: self.out,
            delta: self.delta,
            bins: self.bins,
            ..extra
        };
        Ok(base.overridden_by(flags))
    }
}

fn experiment_spec(args: &ExperimentArgs) -> Result<SuiteSpec> {
    let mut spec = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io {
                path: p.clone(),
                source: e,
            })?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
        }
        None => SuiteSpec::new(vec![10], 10, 20_000, commands::DEFAULT_ETA, 0),
    };
    if let Some(n) = args.generate {
        spec.strategy_counts = vec![n];
    }
    if let Some(r) = args.repetitions {
        spec.repetitions = r;
    }
    if let Some(t) = args.steps {
        spec.horizon = t;
    }
    if let Some(s) = args.seed {
        spec.seed = s;
    }
    if let Some(b) = args.benchmark {
        spec.benchmark = b;
    }
    if args.eta.is_some() || args.epsilon.is_some() {
        let rate = RunConfig {
            eta: args.eta,
            epsilon: args.epsilon,
            ..Default::default()
        };
        spec.eta = rate.eta()?;
    }
    Ok(spec)
}

fn print<S: Serialize>(value: &S) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    // A closed pipe (`| head`) is not an error worth reporting.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(c) => print(&commands::cmd_simulate(
            &c.into_config(RunConfig::default())?,
        )?),
        Command::Analyze {
            common,
            trajectory,
            agent,
            burn_in,
            window,
            benchmark,
        } => {
            let extra = RunConfig {
                trajectory,
                agent,
                burn_in,
                window,
                benchmark,
                ..Default::default()
            };
            print(&commands::cmd_analyze(&common.into_config(extra)?)?)
        }
        Command::Markov {
            common,
            t_max,
            state_cap,
            rationalize,
        } => {
            let extra = RunConfig {
                t_max,
                state_cap,
                rationalize,
                ..Default::default()
            };
            print(&commands::cmd_markov(&common.into_config(extra)?)?)
        }
        Command::SolveNash(c) => print(&commands::cmd_solve_nash(
            &c.into_config(RunConfig::default())?,
        )?),
        Command::Experiment(args) => {
            let spec = experiment_spec(&args)?;
            print(&commands::cmd_experiment(&spec, &args.out)?.summary)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
