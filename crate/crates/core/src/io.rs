//! File formats: game JSON, trajectory CSV/JSON, and the CSV exports of the
//! analytics. Agents and strategies are 1-based in every file and 0-based in
//! memory. Every CSV writer has a matching loader.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{MixedProfile, NetworkGame, RationalGame};
use crate::learning::Trajectory;
use crate::markov::{ReturnTimes, StateGraph, WindowOccupation};
use crate::metrics::{Heatmap, RegretSeries, RunRow, SummaryRow};
use crate::numeric::{format_rational, parse_rational, Matrix, Rational};

/// A payoff or probability entry: `"p/q"` strings and integers are exact,
/// other numbers are floats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Entry {
    fn is_exact(&self) -> bool {
        !matches!(self, Entry::Float(_))
    }

    fn rational(&self) -> Result<Rational> {
        match self {
            Entry::Int(v) => Ok(Rational::from_integer((*v).into())),
            Entry::Text(s) => parse_rational(s),
            Entry::Float(v) => Err(Error::Data(format!("{v} is not an exact entry"))),
        }
    }

    fn float(&self) -> Result<f64> {
        let v = match self {
            Entry::Int(v) => *v as f64,
            Entry::Float(v) => *v,
            Entry::Text(s) => crate::numeric::Scalar::to_f64(&parse_rational(s)?),
        };
        if !v.is_finite() {
            return Err(Error::Data(format!("non-finite entry {v}")));
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeFile {
    pub i: usize,
    pub j: usize,
    pub matrix: Vec<Vec<Entry>>,
}

/// On-disk game description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameFile {
    pub agents: usize,
    pub strategy_counts: Vec<usize>,
    pub edges: Vec<EdgeFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equilibrium: Option<Vec<Vec<Entry>>>,
}

/// A loaded game, exact when every entry in the file was exact.
#[derive(Clone, Debug, PartialEq)]
pub enum LoadedGame {
    Float {
        game: NetworkGame,
        equilibrium: Option<MixedProfile>,
    },
    Rational {
        game: RationalGame,
        equilibrium: Option<MixedProfile<Rational>>,
    },
}

impl LoadedGame {
    pub fn is_rational(&self) -> bool {
        matches!(self, LoadedGame::Rational { .. })
    }

    pub fn to_f64(&self) -> (NetworkGame, Option<MixedProfile>) {
        match self {
            LoadedGame::Float { game, equilibrium } => (game.clone(), equilibrium.clone()),
            LoadedGame::Rational { game, equilibrium } => (
                game.to_f64(),
                equilibrium.as_ref().map(MixedProfile::to_f64),
            ),
        }
    }
}

impl GameFile {
    fn is_exact(&self) -> bool {
        let eq = self.equilibrium.iter().flatten().flatten();
        self.edges
            .iter()
            .flat_map(|e| e.matrix.iter().flatten())
            .chain(eq)
            .all(Entry::is_exact)
    }

    /// Converts to an in-memory game, checking structure and the zero-sum
    /// property.
    pub fn into_game(self) -> Result<LoadedGame> {
        if self.agents != self.strategy_counts.len() {
            return Err(Error::Data(format!(
                "agents = {} but {} strategy counts given",
                self.agents,
                self.strategy_counts.len()
            )));
        }
        if self.is_exact() {
            let game = self.build(Entry::rational)?;
            let equilibrium = self.equilibrium(&game, Entry::rational)?;
            Ok(LoadedGame::Rational { game, equilibrium })
        } else {
            let game = self.build(Entry::float)?;
            let equilibrium = self.equilibrium(&game, Entry::float)?;
            Ok(LoadedGame::Float { game, equilibrium })
        }
    }

    fn build<T: crate::numeric::Scalar>(
        &self,
        conv: fn(&Entry) -> Result<T>,
    ) -> Result<NetworkGame<T>> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            if e.i == 0 || e.j == 0 {
                return Err(Error::Data(format!(
                    "edge ({}, {}): agents are numbered from 1",
                    e.i, e.j
                )));
            }
            let rows = e
                .matrix
                .iter()
                .map(|r| r.iter().map(conv).collect::<Result<Vec<T>>>())
                .collect::<Result<Vec<_>>>()?;
            let m = Matrix::from_rows(rows)
                .map_err(|err| data(format!("edge ({}, {}): {err}", e.i, e.j)))?;
            edges.push((e.i - 1, e.j - 1, m));
        }
        let game = NetworkGame::new(self.strategy_counts.clone(), edges)
            .map_err(|e| data(e.to_string()))?;
        let report = game.validate_zero_sum();
        if !report.is_valid() {
            return Err(Error::NotZeroSum(report.max_deviation));
        }
        Ok(game)
    }

    fn equilibrium<T: crate::numeric::Scalar>(
        &self,
        game: &NetworkGame<T>,
        conv: fn(&Entry) -> Result<T>,
    ) -> Result<Option<MixedProfile<T>>> {
        let Some(eq) = &self.equilibrium else {
            return Ok(None);
        };
        let rows = eq
            .iter()
            .map(|r| r.iter().map(conv).collect::<Result<Vec<T>>>())
            .collect::<Result<Vec<_>>>()?;
        let x = MixedProfile::new(rows).map_err(|e| data(format!("equilibrium: {e}")))?;
        game.check_profile_shape(&x)
            .map_err(|e| data(format!("equilibrium: {e}")))?;
        Ok(Some(x))
    }
}

fn data(msg: String) -> Error {
    Error::Data(msg)
}

/// Builds the file form of a float game; entries are written as numbers.
pub fn game_file(game: &NetworkGame, equilibrium: Option<&MixedProfile>) -> GameFile {
    encode(game, equilibrium, |v| Entry::Float(*v))
}

/// Builds the file form of an exact game; entries are written as `"p/q"`.
pub fn rational_game_file(
    game: &RationalGame,
    equilibrium: Option<&MixedProfile<Rational>>,
) -> GameFile {
    encode(game, equilibrium, |v| Entry::Text(format_rational(v)))
}

fn encode<T: crate::numeric::Scalar>(
    game: &NetworkGame<T>,
    equilibrium: Option<&MixedProfile<T>>,
    f: impl Fn(&T) -> Entry,
) -> GameFile {
    let row = |r: &[T]| r.iter().map(&f).collect::<Vec<_>>();
    GameFile {
        agents: game.num_agents(),
        strategy_counts: game.strategy_counts().to_vec(),
        edges: game
            .edges()
            .map(|(i, j, m)| EdgeFile {
                i: i + 1,
                j: j + 1,
                matrix: m.to_rows().iter().map(|r| row(r)).collect(),
            })
            .collect(),
        equilibrium: equilibrium.map(|x| x.as_slices().iter().map(|r| row(r)).collect()),
    }
}

pub fn parse_game(text: &str) -> Result<LoadedGame> {
    let file: GameFile = serde_json::from_str(text).map_err(|e| data(format!("game file: {e}")))?;
    file.into_game()
}

pub fn read_game(path: impl AsRef<Path>) -> Result<LoadedGame> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_game(&text).map_err(|e| match e {
        Error::Data(msg) => Error::Data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_game(path: impl AsRef<Path>, file: &GameFile) -> Result<()> {
    write_json(path, file)
}

pub fn write_json<S: Serialize + ?Sized>(path: impl AsRef<Path>, value: &S) -> Result<()> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_json<D: DeserializeOwned>(path: impl AsRef<Path>) -> Result<D> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_reader(BufReader::new(f)).map_err(|e| data(format!("{}: {e}", path.display())))
}

pub fn write_trajectory_json(path: impl AsRef<Path>, trajectory: &Trajectory) -> Result<()> {
    write_json(path, trajectory)
}

pub fn read_trajectory_json(path: impl AsRef<Path>) -> Result<Trajectory> {
    read_json(path)
}

/// State graph export. There is no loader: the graph is rebuilt from the game.
pub fn write_state_graph(path: impl AsRef<Path>, graph: &StateGraph) -> Result<()> {
    write_json(path, graph)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(f))
}

fn csv_reader(path: &Path, headers: bool) -> Result<csv::Reader<File>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(headers)
        .from_reader(f))
}

fn write_records<R: Serialize>(path: impl AsRef<Path>, rows: &[R]) -> Result<()> {
    let mut w = csv_writer(path.as_ref())?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path.as_ref(), e))
}

fn read_records<R: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<R>> {
    let mut r = csv_reader(path.as_ref(), true)?;
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<R>, _>>()?;
    Ok(rows)
}

/// One line of the trajectory CSV. `realized` is the strategy the agent
/// played to produce this state, empty at `t = 0` and in deterministic runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub t: usize,
    pub agent: usize,
    pub strategy: usize,
    pub x: f64,
    pub y: f64,
    pub realized: Option<usize>,
}

pub fn trajectory_records(trajectory: &Trajectory) -> Vec<TrajectoryRecord> {
    let mut out = Vec::new();
    for t in 0..=trajectory.horizon() {
        let (x, y, realized) = if t == 0 {
            (&trajectory.initial.x, &trajectory.initial.y, None)
        } else {
            let s = &trajectory.steps[t - 1];
            (&s.x, &s.y, s.realized.as_ref())
        };
        for (i, yi) in y.iter().enumerate() {
            for (k, &yk) in yi.iter().enumerate() {
                out.push(TrajectoryRecord {
                    t,
                    agent: i + 1,
                    strategy: k + 1,
                    x: x.agent(i)[k],
                    y: yk,
                    realized: realized.map(|s| s.0[i] + 1),
                });
            }
        }
    }
    out
}

pub fn write_trajectory_csv(path: impl AsRef<Path>, trajectory: &Trajectory) -> Result<()> {
    write_records(path, &trajectory_records(trajectory))
}

pub fn read_trajectory_csv(path: impl AsRef<Path>) -> Result<Vec<TrajectoryRecord>> {
    read_records(path)
}

/// Divergences of `x^t` (and `y^t`) from an equilibrium.
#[derive(Clone, Debug, PartialEq)]
pub struct DivergenceRow {
    pub t: usize,
    pub kl: f64,
    pub fenchel: f64,
    pub kl_terms: Vec<f64>,
    pub fenchel_terms: Vec<f64>,
}

pub fn write_divergence_csv(path: impl AsRef<Path>, rows: &[DivergenceRow]) -> Result<()> {
    let path = path.as_ref();
    let agents = rows.first().map_or(0, |r| r.kl_terms.len());
    let mut w = csv_writer(path)?;
    let mut header = vec!["t".to_string(), "D_KL".into(), "F_h".into()];
    header.extend((1..=agents).map(|i| format!("D_KL_{i}")));
    header.extend((1..=agents).map(|i| format!("F_h_{i}")));
    w.write_record(&header)?;
    for r in rows {
        if r.kl_terms.len() != agents || r.fenchel_terms.len() != agents {
            return Err(Error::Shape(
                "divergence rows disagree on the number of agents".into(),
            ));
        }
        let mut rec = vec![r.t.to_string(), r.kl.to_string(), r.fenchel.to_string()];
        rec.extend(
            r.kl_terms
                .iter()
                .chain(&r.fenchel_terms)
                .map(f64::to_string),
        );
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_divergence_csv(path: impl AsRef<Path>) -> Result<Vec<DivergenceRow>> {
    let path = path.as_ref();
    let mut r = csv_reader(path, true)?;
    let width = r.headers()?.len();
    if width < 3 || (width - 3) % 2 != 0 {
        return Err(data(format!(
            "{}: malformed divergence header",
            path.display()
        )));
    }
    let agents = (width - 3) / 2;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let t = rec[0]
            .parse()
            .map_err(|_| data(format!("bad time index {:?}", &rec[0])))?;
        let vals = rec
            .iter()
            .skip(1)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| data(format!("bad number {v:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(DivergenceRow {
            t,
            kl: vals[0],
            fenchel: vals[1],
            kl_terms: vals[2..2 + agents].to_vec(),
            fenchel_terms: vals[2 + agents..].to_vec(),
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceRecord {
    pub t: usize,
    pub distance: f64,
}

pub fn write_distance_csv(path: impl AsRef<Path>, rows: &[DistanceRecord]) -> Result<()> {
    write_records(path, rows)
}

pub fn read_distance_csv(path: impl AsRef<Path>) -> Result<Vec<DistanceRecord>> {
    read_records(path)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegretRecord {
    pub t: usize,
    #[serde(rename = "R")]
    pub regret: f64,
    #[serde(rename = "R_max")]
    pub running_max: f64,
}

/// Writes `(t, R(t), max_{s<=t} R(s))` for `t = 1..=T`.
pub fn write_regret_csv(path: impl AsRef<Path>, series: &RegretSeries) -> Result<()> {
    let rows: Vec<RegretRecord> = series
        .regret
        .iter()
        .zip(&series.running_max)
        .enumerate()
        .map(|(k, (&regret, &running_max))| RegretRecord {
            t: k + 1,
            regret,
            running_max,
        })
        .collect();
    write_records(path, &rows)
}

pub fn read_regret_csv(path: impl AsRef<Path>) -> Result<Vec<RegretRecord>> {
    read_records(path)
}

pub fn write_runs_csv(path: impl AsRef<Path>, rows: &[RunRow]) -> Result<()> {
    write_records(path, rows)
}

pub fn read_runs_csv(path: impl AsRef<Path>) -> Result<Vec<RunRow>> {
    read_records(path)
}

pub fn write_summary_csv(path: impl AsRef<Path>, rows: &[SummaryRow]) -> Result<()> {
    write_records(path, rows)
}

pub fn read_summary_csv(path: impl AsRef<Path>) -> Result<Vec<SummaryRow>> {
    read_records(path)
}

/// Headerless `bins x bins` count matrix, one grid row per line.
pub fn write_heatmap_csv(path: impl AsRef<Path>, heatmap: &Heatmap) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(File::create(path).map_err(|e| Error::io(path, e))?);
    for row in &heatmap.counts {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_heatmap_csv(path: impl AsRef<Path>) -> Result<Heatmap> {
    let path = path.as_ref();
    let mut r = csv_reader(path, false)?;
    let counts = r
        .deserialize()
        .collect::<std::result::Result<Vec<Vec<u64>>, _>>()?;
    let bins = counts.len();
    if counts.iter().any(|row| row.len() != bins) {
        return Err(data(format!("{}: heatmap is not square", path.display())));
    }
    Ok(Heatmap { bins, counts })
}

pub fn write_occupation_csv(path: impl AsRef<Path>, windows: &[WindowOccupation]) -> Result<()> {
    write_records(path, windows)
}

pub fn read_occupation_csv(path: impl AsRef<Path>) -> Result<Vec<WindowOccupation>> {
    read_records(path)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReturnRecord {
    pub excursion: usize,
    pub length: usize,
    pub censored: bool,
}

pub fn return_records(times: &ReturnTimes) -> Vec<ReturnRecord> {
    let done = times.samples.iter().map(|&length| (length, false));
    done.chain(times.censored.map(|length| (length, true)))
        .enumerate()
        .map(|(k, (length, censored))| ReturnRecord {
            excursion: k + 1,
            length,
            censored,
        })
        .collect()
}

pub fn write_return_times_csv(path: impl AsRef<Path>, times: &ReturnTimes) -> Result<()> {
    write_records(path, &return_records(times))
}

pub fn read_return_times_csv(path: impl AsRef<Path>) -> Result<Vec<ReturnRecord>> {
    read_records(path)
}
