//! Network zero-sum games: representation, payoff algebra, Nash checks.

mod generate;
mod solve;

pub use generate::{random_interior_nash_game, random_zero_sum, EntryDistribution};
pub use solve::{solve_2p_zero_sum, ZeroSumSolution};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{dot, Matrix, Rational, Scalar};

/// A game in which every pair of agents `(i, j)` plays a bimatrix game with
/// payoff matrix `A^(ij)` (shape `S_i x S_j`) for agent `i`.
///
/// Pairs without a stored matrix contribute nothing (an all-zero matrix).
/// Agents and strategies are 0-indexed.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkGame<T = f64> {
    strategy_counts: Vec<usize>,
    payoffs: Vec<Vec<Option<Matrix<T>>>>,
}

pub type RationalGame = NetworkGame<Rational>;

/// Per-agent probability vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MixedProfile<T = f64>(Vec<Vec<T>>);

/// Per-agent pure strategy indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PureProfile(pub Vec<usize>);

impl<T: Scalar> NetworkGame<T> {
    /// Builds a game from `(i, j, A^(ij))` triples. Only structure is checked
    /// here; see [`NetworkGame::validate_zero_sum`] for the zero-sum property.
    pub fn new(strategy_counts: Vec<usize>, edges: Vec<(usize, usize, Matrix<T>)>) -> Result<Self> {
        let n = strategy_counts.len();
        if n == 0 {
            return Err(Error::Shape("game needs at least one agent".into()));
        }
        if let Some(i) = strategy_counts.iter().position(|&s| s == 0) {
            return Err(Error::Shape(format!("agent {i} has no strategies")));
        }
        let mut payoffs = vec![vec![None; n]; n];
        for (i, j, m) in edges {
            if i >= n || j >= n {
                return Err(Error::Shape(format!(
                    "edge ({i}, {j}) references a missing agent"
                )));
            }
            if i == j {
                return Err(Error::Shape(format!("self-edge on agent {i}")));
            }
            if m.shape() != (strategy_counts[i], strategy_counts[j]) {
                return Err(Error::Shape(format!(
                    "edge ({i}, {j}) has shape {:?}, expected {:?}",
                    m.shape(),
                    (strategy_counts[i], strategy_counts[j])
                )));
            }
            if payoffs[i][j].is_some() {
                return Err(Error::Shape(format!("duplicate edge ({i}, {j})")));
            }
            payoffs[i][j] = Some(m);
        }
        Ok(NetworkGame {
            strategy_counts,
            payoffs,
        })
    }

    /// Two-agent game with `A^(12) = a` and `A^(21) = -a^T`.
    pub fn two_player(a: Matrix<T>) -> Self {
        let counts = vec![a.rows(), a.cols()];
        let b = a.transpose().neg();
        NetworkGame::new(counts, vec![(0, 1, a), (1, 0, b)]).expect("shapes are consistent")
    }

    pub fn num_agents(&self) -> usize {
        self.strategy_counts.len()
    }

    pub fn strategy_counts(&self) -> &[usize] {
        &self.strategy_counts
    }

    /// Number of pure profiles `|S| = prod_i S_i` (saturating).
    pub fn num_pure_profiles(&self) -> usize {
        self.strategy_counts
            .iter()
            .fold(1usize, |acc, &s| acc.saturating_mul(s))
    }

    pub fn payoff_matrix(&self, i: usize, j: usize) -> Option<&Matrix<T>> {
        self.payoffs.get(i)?.get(j)?.as_ref()
    }

    /// All stored `(i, j, A^(ij))`, ordered by `(i, j)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &Matrix<T>)> + '_ {
        self.payoffs.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter_map(move |(j, m)| m.as_ref().map(|m| (i, j, m)))
        })
    }

    pub fn to_f64(&self) -> NetworkGame<f64> {
        NetworkGame {
            strategy_counts: self.strategy_counts.clone(),
            payoffs: self
                .payoffs
                .iter()
                .map(|row| row.iter().map(|m| m.as_ref().map(Matrix::to_f64)).collect())
                .collect(),
        }
    }

    /// Checks `A^(ij) = -(A^(ji))^T` for every stored pair, treating a missing
    /// counterpart as the zero matrix.
    pub fn validate_zero_sum(&self) -> ZeroSumReport {
        let mut violations = Vec::new();
        let n = self.num_agents();
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (self.payoff_matrix(i, j), self.payoff_matrix(j, i));
                if a.is_none() && b.is_none() {
                    continue;
                }
                let (si, sj) = (self.strategy_counts[i], self.strategy_counts[j]);
                let mut worst = T::zero();
                for r in 0..si {
                    for c in 0..sj {
                        let aij = a.map_or_else(T::zero, |m| m.get(r, c).clone());
                        let bji = b.map_or_else(T::zero, |m| m.get(c, r).clone());
                        let dev = (aij + bji).abs();
                        if dev > worst {
                            worst = dev;
                        }
                    }
                }
                if worst.exceeds(T::CHECK_TOL) {
                    violations.push(PairViolation {
                        i,
                        j,
                        max_deviation: worst.to_f64(),
                    });
                }
            }
        }
        let max_deviation = violations
            .iter()
            .map(|v| v.max_deviation)
            .fold(0.0, f64::max);
        ZeroSumReport {
            violations,
            max_deviation,
        }
    }

    /// `sum_{j != i} A^(ij) x_j` for a mixed profile (the entry for agent `i`
    /// itself is ignored).
    pub fn payoff_vector(&self, agent: usize, profile: &MixedProfile<T>) -> Result<Vec<T>> {
        self.check_agent(agent)?;
        self.check_profile_shape(profile)?;
        Ok(self.payoff_against(agent, profile.as_slices()))
    }

    /// `sum_{j != i} A^(ij) e_{s_j}` for a pure profile.
    pub fn payoff_vector_pure(&self, agent: usize, profile: &PureProfile) -> Result<Vec<T>> {
        self.check_agent(agent)?;
        self.check_pure_shape(profile)?;
        Ok(self.payoff_against_pure(agent, &profile.0))
    }

    pub(crate) fn payoff_against(&self, agent: usize, x: &[Vec<T>]) -> Vec<T> {
        let mut out = vec![T::zero(); self.strategy_counts[agent]];
        for (j, m) in self.payoffs[agent].iter().enumerate() {
            if let Some(m) = m {
                for (o, v) in out.iter_mut().zip(m.mul_vec(&x[j])) {
                    *o = o.clone() + v;
                }
            }
        }
        out
    }

    pub(crate) fn payoff_against_pure(&self, agent: usize, s: &[usize]) -> Vec<T> {
        let mut out = vec![T::zero(); self.strategy_counts[agent]];
        for (j, m) in self.payoffs[agent].iter().enumerate() {
            if let Some(m) = m {
                for (o, v) in out.iter_mut().zip(m.column(s[j])) {
                    *o = o.clone() + v.clone();
                }
            }
        }
        out
    }

    /// `<x_i, sum_{j != i} A^(ij) x_j>`.
    pub fn expected_payoff(&self, agent: usize, profile: &MixedProfile<T>) -> Result<T> {
        let u = self.payoff_vector(agent, profile)?;
        Ok(dot(profile.agent(agent), &u))
    }

    /// Accepts iff no agent gains more than `tol` by switching to any pure
    /// strategy.
    pub fn verify_nash(&self, candidate: &MixedProfile<T>, tol: f64) -> Result<NashReport> {
        self.check_profile_shape(candidate)?;
        let mut worst: Option<(T, usize, usize)> = None;
        for i in 0..self.num_agents() {
            let u = self.payoff_against(i, candidate.as_slices());
            let value = dot(candidate.agent(i), &u);
            for (s, us) in u.into_iter().enumerate() {
                let gain = us - value.clone();
                if worst.as_ref().is_none_or(|(w, _, _)| gain > *w) {
                    worst = Some((gain, i, s));
                }
            }
        }
        let (gain, agent, strategy) = worst.expect("at least one agent and strategy");
        Ok(NashReport {
            is_nash: !gain.exceeds(tol),
            max_violation: gain.to_f64(),
            agent,
            strategy,
        })
    }

    /// Shifts payoff matrices by constants so every agent's expected payoff at
    /// `equilibrium` is zero. For agent `i = 0..N-2` the pair `(i, i+1)` is
    /// shifted by `-v_i` and `(i+1, i)` by `+v_i`, which keeps the game
    /// zero-sum and leaves agents `< i` untouched.
    pub fn normalize_nash_value(&self, equilibrium: &MixedProfile<T>) -> Result<Self> {
        let report = self.verify_nash(equilibrium, nash_tol::<T>())?;
        if !report.is_nash {
            return Err(Error::NotNash {
                violation: report.max_violation,
                agent: report.agent,
                strategy: report.strategy,
            });
        }
        let mut game = self.clone();
        for i in 0..game.num_agents().saturating_sub(1) {
            let v = game.expected_payoff(i, equilibrium)?;
            if v.is_zero() {
                continue;
            }
            let j = i + 1;
            let (si, sj) = (game.strategy_counts[i], game.strategy_counts[j]);
            let fwd = game.payoffs[i][j]
                .take()
                .unwrap_or_else(|| Matrix::zeros(si, sj));
            let back = game.payoffs[j][i]
                .take()
                .unwrap_or_else(|| Matrix::zeros(sj, si));
            game.payoffs[i][j] = Some(fwd.shifted(&-v.clone()));
            game.payoffs[j][i] = Some(back.shifted(&v));
        }
        Ok(game)
    }

    /// True iff no agent's payoff vector depends on the opponents' choices,
    /// i.e. every `A^(ij)` has identical columns.
    pub fn is_trivial(&self) -> bool {
        self.edges().all(|(_, _, m)| {
            (1..m.cols()).all(|c| m.column(c).zip(m.column(0)).all(|(a, b)| a == b))
        })
    }

    fn check_agent(&self, agent: usize) -> Result<()> {
        if agent >= self.num_agents() {
            return Err(Error::Shape(format!(
                "agent {agent} out of range for {} agents",
                self.num_agents()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_profile_shape(&self, p: &MixedProfile<T>) -> Result<()> {
        let lens: Vec<usize> = p.0.iter().map(Vec::len).collect();
        if lens != self.strategy_counts {
            return Err(Error::Shape(format!(
                "profile lengths {lens:?} do not match strategy counts {:?}",
                self.strategy_counts
            )));
        }
        Ok(())
    }

    pub(crate) fn check_pure_shape(&self, p: &PureProfile) -> Result<()> {
        if p.0.len() != self.num_agents()
            || p.0.iter().zip(&self.strategy_counts).any(|(&s, &n)| s >= n)
        {
            return Err(Error::Shape(format!(
                "pure profile {:?} invalid for strategy counts {:?}",
                p.0, self.strategy_counts
            )));
        }
        Ok(())
    }

    /// Every pure profile in lexicographic order (last agent varies fastest).
    pub fn pure_profiles(&self) -> PureProfiles {
        PureProfiles::new(self.strategy_counts.clone())
    }
}

impl NetworkGame<f64> {
    /// Rounds every entry onto the grid `1/denominator`.
    pub fn rationalize(&self, denominator: u64) -> Result<RationalGame> {
        let edges = self
            .edges()
            .map(|(i, j, m)| Ok((i, j, m.rationalize(denominator)?)))
            .collect::<Result<Vec<_>>>()?;
        NetworkGame::new(self.strategy_counts.clone(), edges)
    }
}

/// Nash tolerance used by operations that require a verified equilibrium.
pub(crate) fn nash_tol<T: Scalar>() -> f64 {
    if T::EXACT {
        0.0
    } else {
        1e-9
    }
}

impl<T: Scalar> NetworkGame<T> {
    /// `A = [[1, -1], [-1, 1]]`.
    pub fn matching_pennies() -> Self {
        let one = T::one();
        let a = Matrix::from_rows(vec![
            vec![one.clone(), -one.clone()],
            vec![-one.clone(), one],
        ])
        .expect("square");
        NetworkGame::two_player(a)
    }

    /// Rock, paper, scissors with win `+1`, loss `-1`.
    pub fn rock_paper_scissors() -> Self {
        let v = |k: i64| T::from_i64(k);
        let a = Matrix::from_rows(vec![
            vec![v(0), v(-1), v(1)],
            vec![v(1), v(0), v(-1)],
            vec![v(-1), v(1), v(0)],
        ])
        .expect("square");
        NetworkGame::two_player(a)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairViolation {
    pub i: usize,
    pub j: usize,
    pub max_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroSumReport {
    pub violations: Vec<PairViolation>,
    pub max_deviation: f64,
}

impl ZeroSumReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NashReport {
    pub is_nash: bool,
    /// Largest gain from a unilateral pure deviation (may be negative).
    pub max_violation: f64,
    pub agent: usize,
    pub strategy: usize,
}

impl<T: Scalar> MixedProfile<T> {
    /// Validates nonnegativity and unit sums (exact for rationals).
    pub fn new(strategies: Vec<Vec<T>>) -> Result<Self> {
        for (i, x) in strategies.iter().enumerate() {
            if x.is_empty() {
                return Err(Error::Shape(format!("agent {i} has an empty strategy")));
            }
            if x.iter().any(|v| *v < T::zero()) {
                return Err(Error::Domain(format!(
                    "agent {i} has a negative probability"
                )));
            }
            let sum = x.iter().fold(T::zero(), |a, b| a + b.clone());
            if !(sum - T::one()).negligible(T::CHECK_TOL) {
                return Err(Error::Domain(format!(
                    "agent {i} probabilities do not sum to 1"
                )));
            }
        }
        Ok(MixedProfile(strategies))
    }

    pub(crate) fn from_vecs_unchecked(strategies: Vec<Vec<T>>) -> Self {
        MixedProfile(strategies)
    }

    pub fn uniform(strategy_counts: &[usize]) -> Self {
        MixedProfile(
            strategy_counts
                .iter()
                .map(|&n| vec![T::one() / T::from_i64(n as i64); n])
                .collect(),
        )
    }

    /// Embeds a pure profile as vertices of the simplices.
    pub fn from_pure(profile: &PureProfile, strategy_counts: &[usize]) -> Self {
        MixedProfile(
            profile
                .0
                .iter()
                .zip(strategy_counts)
                .map(|(&s, &n)| {
                    let mut v = vec![T::zero(); n];
                    v[s] = T::one();
                    v
                })
                .collect(),
        )
    }

    pub fn num_agents(&self) -> usize {
        self.0.len()
    }

    pub fn agent(&self, i: usize) -> &[T] {
        &self.0[i]
    }

    pub fn as_slices(&self) -> &[Vec<T>] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Vec<T>> {
        self.0
    }

    pub fn is_fully_mixed(&self) -> bool {
        self.0.iter().flatten().all(|v| *v > T::zero())
    }

    /// The pure profile this point sits on, if every agent is at a vertex.
    pub fn as_pure(&self) -> Option<PureProfile> {
        self.0
            .iter()
            .map(|x| {
                let s = x.iter().position(|v| v.is_one())?;
                x.iter()
                    .enumerate()
                    .all(|(k, v)| k == s || v.is_zero())
                    .then_some(s)
            })
            .collect::<Option<Vec<_>>>()
            .map(PureProfile)
    }

    pub fn to_f64(&self) -> MixedProfile<f64> {
        MixedProfile(
            self.0
                .iter()
                .map(|x| x.iter().map(Scalar::to_f64).collect())
                .collect(),
        )
    }
}

impl MixedProfile<f64> {
    /// Largest coordinate difference between two profiles of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Iterator over all pure profiles of a game.
#[derive(Clone, Debug)]
pub struct PureProfiles {
    counts: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl PureProfiles {
    fn new(counts: Vec<usize>) -> Self {
        let next = (!counts.contains(&0)).then(|| vec![0; counts.len()]);
        PureProfiles { counts, next }
    }
}

impl Iterator for PureProfiles {
    type Item = PureProfile;

    fn next(&mut self) -> Option<PureProfile> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut k = succ.len();
        let advanced = loop {
            if k == 0 {
                break false;
            }
            k -= 1;
            succ[k] += 1;
            if succ[k] < self.counts[k] {
                break true;
            }
            succ[k] = 0;
        };
        if advanced {
            self.next = Some(succ);
        }
        Some(PureProfile(current))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::parse_rational;
    use proptest::prelude::*;

    fn mp() -> NetworkGame {
        NetworkGame::matching_pennies()
    }

    fn prof(v: Vec<Vec<f64>>) -> MixedProfile {
        MixedProfile::new(v).unwrap()
    }

    #[test]
    fn zero_entries_are_not_fully_mixed() {
        assert!(!prof(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).is_fully_mixed());
        assert!(!prof(vec![vec![1.0, -0.0], vec![0.5, 0.5]]).is_fully_mixed());
        assert!(prof(vec![vec![0.9, 0.1], vec![0.5, 0.5]]).is_fully_mixed());
    }

    #[test]
    fn matching_pennies_is_zero_sum() {
        let report = mp().validate_zero_sum();
        assert!(report.is_valid());
        assert_eq!(report.max_deviation, 0.0);
    }

    #[test]
    fn antisymmetry_failure_reports_deviation() {
        let one = Matrix::from_rows(vec![vec![1.0]]).unwrap();
        let g = NetworkGame::new(vec![1, 1], vec![(0, 1, one.clone()), (1, 0, one)]).unwrap();
        let report = g.validate_zero_sum();
        assert!(!report.is_valid());
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.max_deviation, 2.0);
    }

    #[test]
    fn single_agent_is_vacuously_zero_sum() {
        let g = NetworkGame::<f64>::new(vec![3], vec![]).unwrap();
        assert!(g.validate_zero_sum().is_valid());
    }

    #[test]
    fn shape_mismatch_is_structural() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0]]).unwrap();
        let err = NetworkGame::new(vec![2, 2], vec![(0, 1, m)]).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn one_sided_edge_is_not_zero_sum() {
        let m = Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let g = NetworkGame::new(vec![2, 2], vec![(0, 1, m)]).unwrap();
        assert!(!g.validate_zero_sum().is_valid());
    }

    #[test]
    fn payoff_vectors() {
        let g = mp();
        let heads = PureProfile(vec![0, 0]);
        assert_eq!(g.payoff_vector_pure(0, &heads).unwrap(), vec![1.0, -1.0]);
        let uniform = MixedProfile::uniform(&[2, 2]);
        assert_eq!(g.payoff_vector(0, &uniform).unwrap(), vec![0.0, 0.0]);
        assert!(g.payoff_vector(2, &uniform).is_err());
    }

    #[test]
    fn expected_payoffs() {
        let g = mp();
        let uniform = MixedProfile::uniform(&[2, 2]);
        assert_eq!(g.expected_payoff(0, &uniform).unwrap(), 0.0);
        assert_eq!(g.expected_payoff(1, &uniform).unwrap(), 0.0);
        let hh = prof(vec![vec![1.0, 0.0], vec![1.0, 0.0]]);
        assert_eq!(g.expected_payoff(0, &hh).unwrap(), 1.0);
        assert_eq!(g.expected_payoff(1, &hh).unwrap(), -1.0);
    }

    #[test]
    fn nash_checks() {
        let g = mp();
        assert!(
            g.verify_nash(&MixedProfile::uniform(&[2, 2]), 1e-12)
                .unwrap()
                .is_nash
        );
        let r = g
            .verify_nash(&prof(vec![vec![1.0, 0.0], vec![0.5, 0.5]]), 1e-12)
            .unwrap();
        assert!(!r.is_nash);
        assert_eq!(r.agent, 1);
        assert_eq!(r.strategy, 1);
        assert!((r.max_violation - 1.0).abs() < 1e-15);

        let zero = NetworkGame::two_player(Matrix::<f64>::zeros(2, 3));
        let p = prof(vec![vec![0.3, 0.7], vec![0.1, 0.2, 0.7]]);
        assert!(zero.verify_nash(&p, 0.0).unwrap().is_nash);
    }

    #[test]
    fn normalize_restores_shifted_matching_pennies() {
        let q = |s: &str| parse_rational(s).unwrap();
        let base = RationalGame::matching_pennies();
        let shift = q("2");
        let a = base.payoff_matrix(0, 1).unwrap().shifted(&shift);
        let b = base.payoff_matrix(1, 0).unwrap().shifted(&-shift);
        let shifted = RationalGame::new(vec![2, 2], vec![(0, 1, a), (1, 0, b)]).unwrap();
        assert!(shifted.validate_zero_sum().is_valid());
        let x = MixedProfile::uniform(&[2, 2]);
        assert_eq!(shifted.expected_payoff(0, &x).unwrap(), q("2"));
        let normalized = shifted.normalize_nash_value(&x).unwrap();
        assert_eq!(normalized, base);
        assert_eq!(base.normalize_nash_value(&x).unwrap(), base);
    }

    #[test]
    fn normalize_rejects_non_equilibrium() {
        let g = mp();
        let p = prof(vec![vec![1.0, 0.0], vec![0.5, 0.5]]);
        assert!(matches!(
            g.normalize_nash_value(&p),
            Err(Error::NotNash { .. })
        ));
    }

    #[test]
    fn normalize_three_agent_chain() {
        // Agent 0 plays matching pennies against 1, agent 1 against 2, each
        // shifted so that values are nonzero.
        let m = |rows: Vec<Vec<f64>>| Matrix::from_rows(rows).unwrap();
        let a01 = m(vec![vec![1.5, -0.5], vec![-0.5, 1.5]]);
        let a12 = m(vec![vec![0.0, 2.0], vec![2.0, 0.0]]);
        let g = NetworkGame::new(
            vec![2, 2, 2],
            vec![
                (0, 1, a01.clone()),
                (1, 0, a01.transpose().neg()),
                (1, 2, a12.clone()),
                (2, 1, a12.transpose().neg()),
            ],
        )
        .unwrap();
        let x = MixedProfile::uniform(&[2, 2, 2]);
        assert!(g.verify_nash(&x, 1e-12).unwrap().is_nash);
        let n = g.normalize_nash_value(&x).unwrap();
        assert!(n.validate_zero_sum().is_valid());
        for i in 0..3 {
            assert!(n.expected_payoff(i, &x).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn triviality() {
        assert!(NetworkGame::two_player(Matrix::<f64>::zeros(2, 2)).is_trivial());
        assert!(!mp().is_trivial());
        let c = Matrix::from_rows(vec![vec![3.0, 3.0], vec![3.0, 3.0]]).unwrap();
        assert!(NetworkGame::two_player(c).is_trivial());
    }

    #[test]
    fn pure_profile_enumeration() {
        let all: Vec<_> = NetworkGame::<f64>::rock_paper_scissors()
            .pure_profiles()
            .collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], PureProfile(vec![0, 0]));
        assert_eq!(all[1], PureProfile(vec![0, 1]));
        assert_eq!(all[8], PureProfile(vec![2, 2]));
    }

    #[test]
    fn as_pure_detects_vertices() {
        let v = prof(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(v.as_pure(), Some(PureProfile(vec![1, 0])));
        assert_eq!(MixedProfile::<f64>::uniform(&[2, 2]).as_pure(), None);
    }

    fn simplex_point(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, n).prop_map(|w| {
            let s: f64 = w.iter().sum::<f64>() + 1e-9;
            let mut x: Vec<f64> = w.iter().map(|v| (v + 1e-9 / w.len() as f64) / s).collect();
            let total: f64 = x.iter().sum();
            x.iter_mut().for_each(|v| *v /= total);
            x
        })
    }

    proptest! {
        #[test]
        fn payoffs_sum_to_zero(seed in 0u64..1000, n in 2usize..6, x in simplex_point(5), y in simplex_point(5)) {
            let g = random_zero_sum(n, seed, &EntryDistribution::default()).unwrap();
            let renorm = |v: &[f64]| { let s: f64 = v[..n].iter().sum(); v[..n].iter().map(|a| a / s).collect::<Vec<_>>() };
            let p = MixedProfile::new(vec![renorm(&x), renorm(&y)]).unwrap();
            let total = g.expected_payoff(0, &p).unwrap() + g.expected_payoff(1, &p).unwrap();
            prop_assert!(total.abs() < 1e-9);
        }

        #[test]
        fn normalization_preserves_best_responses(seed in 0u64..200, shift in -3.0f64..3.0) {
            let (g, x_star) = random_interior_nash_game(3, 3, seed);
            let a = g.payoff_matrix(0, 1).unwrap().shifted(&shift);
            let shifted = NetworkGame::two_player(a);
            let n = shifted.normalize_nash_value(&x_star).unwrap();
            prop_assert!(n.validate_zero_sum().is_valid());
            for i in 0..2 {
                prop_assert!(n.expected_payoff(i, &x_star).unwrap().abs() < 1e-12);
            }
            for s in shifted.pure_profiles() {
                for i in 0..2 {
                    let before = shifted.payoff_vector_pure(i, &s).unwrap();
                    let after = n.payoff_vector_pure(i, &s).unwrap();
                    let argmax = |v: &[f64]| {
                        let m = v.iter().cloned().fold(f64::MIN, f64::max);
                        v.iter().map(|a| (m - a).abs() < 1e-9).collect::<Vec<_>>()
                    };
                    prop_assert_eq!(argmax(&before), argmax(&after));
                }
            }
        }
    }
}
