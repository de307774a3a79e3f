use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{MixedProfile, PureProfile, RationalGame};
use crate::learning::{mirror_profile, Regularizer};
use crate::numeric::{format_rational, Rational, Scalar};

/// Exact payoff vectors with every agent's first coordinate equal to zero.
/// Serializes as nested lists of `"p/q"` strings.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualState(Vec<Vec<Rational>>);

impl Serialize for DualState {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let text: Vec<Vec<String>> = self
            .0
            .iter()
            .map(|v| v.iter().map(format_rational).collect())
            .collect();
        text.serialize(serializer)
    }
}

impl DualState {
    /// The all-zero state for the given strategy counts.
    pub fn zero(strategy_counts: &[usize]) -> Self {
        DualState(
            strategy_counts
                .iter()
                .map(|&k| vec![Rational::zero(); k])
                .collect(),
        )
    }

    pub fn agents(&self) -> &[Vec<Rational>] {
        &self.0
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.0
            .iter()
            .map(|v| v.iter().map(Scalar::to_f64).collect())
            .collect()
    }

    /// Normalized state after every agent adds its payoff vector against the
    /// realized profile `s`.
    pub fn successor(&self, game: &RationalGame, s: &PureProfile) -> DualState {
        let raw: Vec<Vec<Rational>> = self
            .0
            .iter()
            .enumerate()
            .map(|(i, yi)| {
                yi.iter()
                    .zip(game.payoff_against_pure(i, &s.0))
                    .map(|(a, b)| a + b)
                    .collect()
            })
            .collect();
        normalize_dual(&raw)
    }
}

/// Subtracts each agent's first coordinate from all of its coordinates.
pub fn normalize_dual(y: &[Vec<Rational>]) -> DualState {
    DualState(
        y.iter()
            .map(|v| match v.first() {
                Some(first) => v.iter().map(|c| c - first).collect(),
                None => Vec::new(),
            })
            .collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Edge {
    pub from: usize,
    pub profile: PureProfile,
    pub to: usize,
}

/// Dual states reachable from `y^0`, layered by first-reach time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateGraph {
    pub states: Vec<DualState>,
    /// `layers[t]` lists the states first reached after `t` steps.
    pub layers: Vec<Vec<usize>>,
    /// One edge per (expanded state, pure profile). States in the final layer
    /// are not expanded.
    pub edges: Vec<Edge>,
    /// Whether `state_cap` stopped the enumeration before `t_max`.
    pub truncated: bool,
    #[serde(skip)]
    index: HashMap<DualState, usize>,
}

impl StateGraph {
    pub fn index_of(&self, state: &DualState) -> Option<usize> {
        self.index.get(state).copied()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Breadth-first enumeration of the normalized update over every pure
/// profile, up to `t_max` steps or `state_cap` distinct states.
pub fn enumerate_states(
    game: &RationalGame,
    y0: &DualState,
    t_max: usize,
    state_cap: usize,
) -> Result<StateGraph> {
    check_state(game, y0)?;
    let mut graph = StateGraph {
        states: vec![y0.clone()],
        layers: vec![vec![0]],
        edges: Vec::new(),
        truncated: false,
        index: HashMap::from([(y0.clone(), 0)]),
    };
    if state_cap == 0 {
        graph.truncated = true;
        return Ok(graph);
    }
    'layers: for t in 1..=t_max {
        let frontier = graph.layers[t - 1].clone();
        let mut layer = Vec::new();
        for from in frontier {
            for s in game.pure_profiles() {
                let next = graph.states[from].successor(game, &s);
                let to = match graph.index.get(&next) {
                    Some(&k) => k,
                    None => {
                        if graph.states.len() >= state_cap {
                            graph.truncated = true;
                            graph.layers.push(layer);
                            break 'layers;
                        }
                        let k = graph.states.len();
                        graph.index.insert(next.clone(), k);
                        graph.states.push(next);
                        layer.push(k);
                        k
                    }
                };
                graph.edges.push(Edge {
                    from,
                    profile: s,
                    to,
                });
            }
        }
        graph.layers.push(layer);
    }
    Ok(graph)
}

fn check_state(game: &RationalGame, y: &DualState) -> Result<()> {
    let lens: Vec<usize> = y.0.iter().map(Vec::len).collect();
    if lens != game.strategy_counts() {
        return Err(Error::Shape(format!(
            "dual state lengths {lens:?} do not match strategy counts {:?}",
            game.strategy_counts()
        )));
    }
    if y.0.iter().any(|v| !v[0].is_zero()) {
        return Err(Error::Domain(
            "dual state must have zero first coordinates".into(),
        ));
    }
    Ok(())
}

/// Probability of realizing `s` under the mixed profile `x`.
fn profile_probability(x: &MixedProfile, s: &PureProfile) -> f64 {
    s.0.iter()
        .enumerate()
        .map(|(i, &k)| x.agent(i)[k])
        .product()
}

/// One-step kernel from `state`: distinct successors with their probabilities,
/// aggregated over profiles that lead to the same state. Successors appear in
/// order of the first profile reaching them.
pub fn dual_transition(
    game: &RationalGame,
    regs: &[Regularizer],
    etas: &[f64],
    state: &DualState,
) -> Result<Vec<(DualState, f64)>> {
    check_state(game, state)?;
    let x = mirror_profile(regs, etas, &state.to_f64())?;
    let mut out: Vec<(DualState, f64)> = Vec::new();
    let mut seen: HashMap<DualState, usize> = HashMap::new();
    for s in game.pure_profiles() {
        let p = profile_probability(&x, &s);
        let next = state.successor(game, &s);
        match seen.get(&next) {
            Some(&k) => out[k].1 += p,
            None => {
                seen.insert(next.clone(), out.len());
                out.push((next, p));
            }
        }
    }
    Ok(out)
}

/// Least common denominator of every entry of `x`.
pub fn common_denominator(x: &MixedProfile<Rational>) -> BigInt {
    x.as_slices()
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Least common denominator of every payoff entry.
pub fn payoff_denominator(game: &RationalGame) -> BigInt {
    game.edges()
        .flat_map(|(_, _, m)| m.entries().iter())
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

fn check_equilibrium(game: &RationalGame, x_star: &MixedProfile<Rational>) -> Result<()> {
    game.verify_nash(x_star, 0.0).and_then(|r| {
        if r.is_nash {
            Ok(())
        } else {
            Err(Error::NotNash {
                violation: r.max_violation,
                agent: r.agent,
                strategy: r.strategy,
            })
        }
    })?;
    if !x_star.is_fully_mixed() {
        return Err(Error::Domain(
            "return paths need a fully mixed equilibrium".into(),
        ));
    }
    for i in 0..game.num_agents() {
        if game
            .payoff_against(i, x_star.as_slices())
            .iter()
            .any(|v| !v.is_zero())
        {
            return Err(Error::Domain(format!(
                "payoff vector of agent {i} at the equilibrium is not zero; normalize the game"
            )));
        }
    }
    Ok(())
}

/// Profiles that undo the update caused by `entry`.
///
/// With `x*_is = c_is / b` over the common denominator `b`, agent `i` plays
/// its entry strategy `c_is - 1` times and every other strategy `s` exactly
/// `c_is` times, in increasing strategy order. Together with `entry` every
/// agent faces each opponent strategy in proportion to `x*`, so the summed
/// update is `b` times the (zero) payoff vector at `x*`. The result has
/// length `b - 1`.
pub fn return_path(
    game: &RationalGame,
    x_star: &MixedProfile<Rational>,
    entry: &PureProfile,
) -> Result<Vec<PureProfile>> {
    game.check_pure_shape(entry)?;
    check_equilibrium(game, x_star)?;
    let b = common_denominator(x_star);
    let len = usize::try_from(&b - BigInt::one())
        .map_err(|_| Error::SizeLimit(format!("common denominator {b} too large")))?;
    let schedules: Vec<Vec<usize>> = (0..game.num_agents())
        .map(|i| {
            let mut seq = Vec::with_capacity(len);
            for (s, p) in x_star.agent(i).iter().enumerate() {
                let c = (p * Rational::from_integer(b.clone())).to_integer();
                let reps = if s == entry.0[i] {
                    c - BigInt::one()
                } else {
                    c
                };
                let reps = usize::try_from(reps).expect("count fits in the path length");
                seq.extend(std::iter::repeat_n(s, reps));
            }
            debug_assert_eq!(seq.len(), len);
            seq
        })
        .collect();
    Ok((0..len)
        .map(|k| PureProfile(schedules.iter().map(|seq| seq[k]).collect()))
        .collect())
}

/// Applies the normalized update for each profile in turn.
pub fn apply_profiles<'a>(
    game: &RationalGame,
    start: &DualState,
    profiles: impl IntoIterator<Item = &'a PureProfile>,
) -> DualState {
    profiles
        .into_iter()
        .fold(start.clone(), |y, s| y.successor(game, s))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IrreducibilityReport {
    pub states: usize,
    /// States reached from the origin along positive-probability edges.
    pub reached: usize,
    /// States from which the constructed return sequence lands exactly on the
    /// origin through positive-probability steps.
    pub returned: usize,
    /// Indices of states failing either check.
    pub failures: Vec<usize>,
    /// Longest return sequence used.
    pub max_return_length: usize,
    /// The claim covers only the enumerated subgraph; set when the
    /// enumeration was cut short by the state cap.
    pub truncated: bool,
}

impl IrreducibilityReport {
    pub fn is_irreducible(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Certifies irreducibility on an enumerated subgraph.
///
/// Reachability follows graph edges whose probability under the mirror maps
/// is positive. For the way back, a state reached by profiles
/// `s^1, ..., s^t` is sent home by concatenating `return_path(s^k)` for each
/// `k`; the landing state is compared with the origin exactly.
pub fn check_irreducible(
    graph: &StateGraph,
    game: &RationalGame,
    regs: &[Regularizer],
    etas: &[f64],
    origin: &DualState,
    x_star: &MixedProfile<Rational>,
) -> Result<IrreducibilityReport> {
    check_equilibrium(game, x_star)?;
    let root = graph
        .index_of(origin)
        .ok_or_else(|| Error::Domain("origin is not an enumerated state".into()))?;
    let positive = |state: &DualState, s: &PureProfile| -> Result<bool> {
        let x = mirror_profile(regs, etas, &state.to_f64())?;
        Ok(profile_probability(&x, s) > 0.0)
    };

    let mut out_edges: Vec<Vec<&Edge>> = vec![Vec::new(); graph.len()];
    for e in &graph.edges {
        out_edges[e.from].push(e);
    }
    // Breadth-first search records a positive-probability path to each state.
    let mut parent: Vec<Option<(usize, &PureProfile)>> = vec![None; graph.len()];
    let mut reached = vec![false; graph.len()];
    reached[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for e in &out_edges[u] {
            if !reached[e.to] && positive(&graph.states[u], &e.profile)? {
                reached[e.to] = true;
                parent[e.to] = Some((u, &e.profile));
                queue.push_back(e.to);
            }
        }
    }

    let mut failures = Vec::new();
    let mut returned = 0;
    let mut max_return_length = 0;
    for (k, state) in graph.states.iter().enumerate() {
        if !reached[k] {
            failures.push(k);
            continue;
        }
        let mut history = Vec::new();
        let mut cur = k;
        while let Some((p, s)) = parent[cur] {
            history.push(s);
            cur = p;
        }
        let mut y = state.clone();
        let mut ok = true;
        let mut steps = 0;
        for entry in history.iter().rev() {
            for s in return_path(game, x_star, entry)? {
                if !positive(&y, &s)? {
                    ok = false;
                }
                y = y.successor(game, &s);
                steps += 1;
            }
        }
        if ok && y == *origin {
            returned += 1;
            max_return_length = max_return_length.max(steps);
        } else {
            failures.push(k);
        }
    }
    Ok(IrreducibilityReport {
        states: graph.len(),
        reached: reached.iter().filter(|&&r| r).count(),
        returned,
        failures,
        max_return_length,
        truncated: graph.truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::parse_rational;
    use proptest::prelude::*;

    const E: Regularizer = Regularizer::Entropy;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn state(v: &[&[&str]]) -> DualState {
        DualState(v.iter().map(|a| a.iter().map(|s| q(s)).collect()).collect())
    }

    fn uniform(counts: &[usize]) -> MixedProfile<Rational> {
        MixedProfile::new(
            counts
                .iter()
                .map(|&k| vec![Rational::new(1.into(), (k as i64).into()); k])
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(
            normalize_dual(&[vec![q("3"), q("5")]]),
            state(&[&["0", "2"]])
        );
        assert_eq!(
            normalize_dual(&[vec![q("0"), q("0")]]),
            state(&[&["0", "0"]])
        );
    }

    #[test]
    fn matching_pennies_first_layer() {
        let g = RationalGame::matching_pennies();
        let graph = enumerate_states(&g, &DualState::zero(&[2, 2]), 1, 100).unwrap();
        let mut layer: Vec<DualState> = graph.layers[1]
            .iter()
            .map(|&k| graph.states[k].clone())
            .collect();
        layer.sort();
        let mut expected = vec![
            state(&[&["0", "-2"], &["0", "2"]]),
            state(&[&["0", "2"], &["0", "-2"]]),
            state(&[&["0", "2"], &["0", "2"]]),
            state(&[&["0", "-2"], &["0", "-2"]]),
        ];
        expected.sort();
        assert_eq!(layer, expected);
        assert_eq!(graph.edges.len(), 4);
        let hh = graph.edges.iter().find(|e| e.profile.0 == [0, 0]).unwrap();
        assert_eq!(graph.states[hh.to], state(&[&["0", "-2"], &["0", "2"]]));
    }

    #[test]
    fn zero_horizon_graph() {
        let g = RationalGame::rock_paper_scissors();
        let graph = enumerate_states(&g, &DualState::zero(&[3, 3]), 0, 100).unwrap();
        assert_eq!(graph.len(), 1);
        assert!(graph.edges.is_empty());
        assert!(!graph.truncated);
    }

    #[test]
    fn state_cap_truncates() {
        let g = RationalGame::rock_paper_scissors();
        let graph = enumerate_states(&g, &DualState::zero(&[3, 3]), 4, 10).unwrap();
        assert!(graph.truncated);
        assert_eq!(graph.len(), 10);
    }

    #[test]
    fn rejects_unnormalized_origin() {
        let g = RationalGame::matching_pennies();
        let y = state(&[&["1", "0"], &["0", "0"]]);
        assert!(enumerate_states(&g, &y, 1, 10).is_err());
    }

    #[test]
    fn uniform_transition() {
        let g = RationalGame::matching_pennies();
        let t = dual_transition(&g, &[E, E], &[0.1, 0.1], &DualState::zero(&[2, 2])).unwrap();
        assert_eq!(t.len(), 4);
        assert!(t.iter().all(|(_, p)| *p == 0.25));
    }

    #[test]
    fn return_path_matching_pennies() {
        let g = RationalGame::matching_pennies();
        let xs = uniform(&[2, 2]);
        let entry = PureProfile(vec![0, 0]);
        let path = return_path(&g, &xs, &entry).unwrap();
        assert_eq!(path, vec![PureProfile(vec![1, 1])]);
        let y0 = DualState::zero(&[2, 2]);
        let back = apply_profiles(&g, &y0, std::iter::once(&entry).chain(&path));
        assert_eq!(back, y0);
    }

    #[test]
    fn return_path_rock_paper_scissors() {
        let g = RationalGame::rock_paper_scissors();
        let xs = uniform(&[3, 3]);
        let entry = PureProfile(vec![0, 0]);
        let path = return_path(&g, &xs, &entry).unwrap();
        assert_eq!(path.len(), 2);
        for i in 0..2 {
            let mut counts = [0; 3];
            path.iter().for_each(|s| counts[s.0[i]] += 1);
            assert_eq!(counts, [0, 1, 1]);
        }
        let y0 = DualState::zero(&[3, 3]);
        assert_eq!(
            apply_profiles(&g, &y0, std::iter::once(&entry).chain(&path)),
            y0
        );
    }

    #[test]
    fn return_path_with_uneven_equilibrium() {
        // [[3, -1], [-2, 1]] has x* = (3/7, 4/7), y* = (2/7, 5/7), value 1/7.
        let m =
            crate::numeric::Matrix::from_rows(vec![vec![q("3"), q("-1")], vec![q("-2"), q("1")]])
                .unwrap();
        let g = RationalGame::two_player(m);
        let xs =
            MixedProfile::new(vec![vec![q("3/7"), q("4/7")], vec![q("2/7"), q("5/7")]]).unwrap();
        assert!(matches!(
            return_path(&g, &xs, &PureProfile(vec![0, 0])),
            Err(Error::Domain(_))
        ));
        let g = g.normalize_nash_value(&xs).unwrap();
        let y0 = DualState::zero(&[2, 2]);
        for entry in g.pure_profiles() {
            let path = return_path(&g, &xs, &entry).unwrap();
            assert_eq!(path.len(), 6);
            let start = state(&[&["0", "5/3"], &["0", "-1"]]);
            assert_eq!(
                apply_profiles(&g, &start, std::iter::once(&entry).chain(&path)),
                start
            );
            assert_eq!(
                apply_profiles(&g, &y0, std::iter::once(&entry).chain(&path)),
                y0
            );
        }
    }

    #[test]
    fn return_path_rejections() {
        let g = RationalGame::matching_pennies();
        let pure = MixedProfile::new(vec![vec![q("1"), q("0")], vec![q("1/2"), q("1/2")]]).unwrap();
        assert!(matches!(
            return_path(&g, &pure, &PureProfile(vec![0, 0])),
            Err(Error::NotNash { .. })
        ));
    }

    #[test]
    fn irreducible_matching_pennies() {
        let g = RationalGame::matching_pennies();
        let y0 = DualState::zero(&[2, 2]);
        let graph = enumerate_states(&g, &y0, 4, 100_000).unwrap();
        let r =
            check_irreducible(&graph, &g, &[E, E], &[0.1, 0.1], &y0, &uniform(&[2, 2])).unwrap();
        assert!(r.is_irreducible(), "{r:?}");
        assert_eq!(r.reached, graph.len());
        assert_eq!(r.max_return_length, 4);
    }

    #[test]
    fn origin_only_graph_is_irreducible() {
        let g = RationalGame::matching_pennies();
        let y0 = DualState::zero(&[2, 2]);
        let graph = enumerate_states(&g, &y0, 0, 10).unwrap();
        let r =
            check_irreducible(&graph, &g, &[E, E], &[0.1, 0.1], &y0, &uniform(&[2, 2])).unwrap();
        assert!(r.is_irreducible());
        assert_eq!(r.max_return_length, 0);
    }

    #[test]
    fn lattice_property() {
        let g = RationalGame::rock_paper_scissors();
        let y0 = DualState::zero(&[3, 3]);
        let graph = enumerate_states(&g, &y0, 3, 100_000).unwrap();
        let b = payoff_denominator(&g);
        assert_eq!(b, BigInt::one());
        for s in &graph.states {
            assert!(s
                .agents()
                .iter()
                .flatten()
                .all(|v| (v * Rational::from_integer(b.clone())).is_integer()));
        }
    }

    fn mp_state() -> impl Strategy<Value = DualState> {
        prop::collection::vec((-20i64..20, 1i64..6), 2).prop_map(|v| {
            let agent =
                |(n, d): (i64, i64)| vec![Rational::zero(), Rational::new(n.into(), d.into())];
            DualState(vec![agent(v[0]), agent(v[1])])
        })
    }

    proptest! {
        #[test]
        fn transition_probabilities_sum_to_one(y in mp_state(), eta in 0.01f64..1.0) {
            let g = RationalGame::matching_pennies();
            let t = dual_transition(&g, &[E, E], &[eta, eta], &y).unwrap();
            let total: f64 = t.iter().map(|(_, p)| p).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!(t.iter().all(|(_, p)| *p > 0.0 && *p <= 1.0));
        }

        #[test]
        fn normalization_preserves_mirror_map(raw in prop::collection::vec((-50i64..50, 1i64..9), 4)) {
            let y: Vec<Vec<Rational>> = raw
                .chunks(2)
                .map(|c| c.iter().map(|&(n, d)| Rational::new(n.into(), d.into())).collect())
                .collect();
            let to_f = |v: &[Vec<Rational>]| -> Vec<Vec<f64>> {
                v.iter().map(|a| a.iter().map(Scalar::to_f64).collect()).collect()
            };
            let n = normalize_dual(&y);
            for reg in [E, Regularizer::SquaredEuclidean] {
                let a = mirror_profile(&[reg, reg], &[0.3, 0.3], &to_f(&y)).unwrap();
                let b = mirror_profile(&[reg, reg], &[0.3, 0.3], &to_f(n.agents())).unwrap();
                prop_assert!(a.max_abs_diff(&b) < 1e-12);
            }
        }
    }
}
