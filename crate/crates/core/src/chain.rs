//! Reachable-state Markov chains of a term under a strategy, and their exact
//! absorption analysis.
//!
//! States are α-classes of reducible terms. All normal forms are collapsed
//! into the single absorbing class `trm`, which self-loops with probability
//! one and is not stored as a row. Hitting probabilities and expected
//! hitting times are obtained by solving one small exact system per
//! strongly connected component, in reverse topological order.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};

use crate::canonical::CanonicalTerm;
use crate::error::ChainError;
use crate::linsolve;
use crate::strategy::{fmt_ratio, n_steps, Deterministic, Probability, Strategy};
use crate::term::Term;

pub const DEFAULT_STATE_CAP: usize = 100_000;

/// Destination of a transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    State(usize),
    Trm,
}

#[derive(Clone, Debug)]
pub struct ChainState {
    pub term: CanonicalTerm,
    /// The first named term seen for this class, used for display.
    pub representative: Term,
}

/// The explored chain before solving.
#[derive(Clone, Debug)]
pub struct StateGraph {
    pub strategy: Strategy,
    pub origin: Target,
    pub origin_term: Term,
    pub states: Vec<ChainState>,
    /// One row per non-absorbing state; probabilities are positive and sum to 1.
    pub transitions: Vec<BTreeMap<Target, BigRational>>,
}

impl StateGraph {
    /// Number of chain states including `trm`.
    pub fn state_count(&self) -> usize {
        self.states.len() + 1
    }

    pub fn index_of(&self, t: &Term) -> Option<Target> {
        let c = t.canonicalize();
        if c.is_normal_form() {
            return Some(Target::Trm);
        }
        self.states.iter().position(|s| s.term == c).map(Target::State)
    }

    pub fn probability(&self, from: usize, to: Target) -> BigRational {
        self.transitions[from]
            .get(&to)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// `P(T = i)` for `i < horizon`, where `T` is the absorption time from
    /// the origin.
    pub fn absorption_time_dist(&self, horizon: usize) -> Vec<BigRational> {
        let mut out = Vec::with_capacity(horizon);
        let start = match self.origin {
            Target::Trm => {
                out.extend((0..horizon).map(|i| if i == 0 { BigRational::one() } else { BigRational::zero() }));
                return out;
            }
            Target::State(s) => s,
        };
        let mut v: BTreeMap<usize, BigRational> = BTreeMap::new();
        v.insert(start, BigRational::one());
        if horizon > 0 {
            out.push(BigRational::zero());
        }
        while out.len() < horizon {
            let mut next: BTreeMap<usize, BigRational> = BTreeMap::new();
            let mut absorbed = BigRational::zero();
            for (&s, mass) in &v {
                for (to, p) in &self.transitions[s] {
                    let m = mass * p;
                    match to {
                        Target::Trm => absorbed += m,
                        Target::State(j) => *next.entry(*j).or_insert_with(BigRational::zero) += m,
                    }
                }
            }
            out.push(absorbed);
            v = next;
        }
        out
    }
}

/// Breadth-first closure of `t` under the supports of `strategy`.
pub fn explore_states(t: &Term, strategy: &Strategy, state_cap: usize) -> Result<StateGraph, ChainError> {
    let mut graph = StateGraph {
        strategy: strategy.clone(),
        origin: Target::Trm,
        origin_term: t.clone(),
        states: Vec::new(),
        transitions: Vec::new(),
    };
    let origin = t.canonicalize();
    if origin.is_normal_form() {
        return Ok(graph);
    }
    let mut index: HashMap<CanonicalTerm, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    index.insert(origin.clone(), 0);
    graph.states.push(ChainState {
        term: origin,
        representative: t.clone(),
    });
    graph.origin = Target::State(0);
    queue.push_back(0usize);

    while let Some(s) = queue.pop_front() {
        let mu = strategy
            .distribution(&graph.states[s].representative)
            .expect("non-absorbing states are reducible");
        let mut row = BTreeMap::new();
        for (target, p) in mu.iter() {
            let to = if target.is_normal_form() {
                Target::Trm
            } else if let Some(&j) = index.get(target) {
                Target::State(j)
            } else {
                let j = graph.states.len();
                if j >= state_cap {
                    return Err(ChainError::StateCapExceeded {
                        cap: state_cap,
                        frontier: queue.len() + 1,
                    });
                }
                index.insert(target.clone(), j);
                graph.states.push(ChainState {
                    term: target.clone(),
                    representative: target.to_term(),
                });
                queue.push_back(j);
                Target::State(j)
            };
            *row.entry(to).or_insert_with(BigRational::zero) += p;
        }
        debug_assert_eq!(graph.transitions.len(), s);
        graph.transitions.push(row);
    }
    Ok(graph)
}

/// Expected absorption time.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ExpectedLength {
    Finite(BigRational),
    Infinite,
}

impl ExpectedLength {
    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            ExpectedLength::Finite(v) => Some(v),
            ExpectedLength::Infinite => None,
        }
    }
}

impl fmt::Display for ExpectedLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpectedLength::Finite(v) => f.write_str(&fmt_ratio(v)),
            ExpectedLength::Infinite => f.write_str("inf"),
        }
    }
}

impl fmt::Debug for ExpectedLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A solved chain.
#[derive(Clone, Debug)]
pub struct ChainAnalysis {
    pub graph: StateGraph,
    /// Probability of absorption in `trm` from each state.
    pub hitting: Vec<BigRational>,
    /// Expected absorption time from each state.
    pub expected: Vec<ExpectedLength>,
    pub termination_prob: BigRational,
    pub expected_length: ExpectedLength,
}

impl ChainAnalysis {
    /// Whether `ε = 0`: then `P_ε` is RI and PAST is not guaranteed.
    pub fn outside_past_hypothesis(&self) -> bool {
        match &self.graph.strategy {
            Strategy::Ri => true,
            Strategy::PEps(eps) => eps.is_zero(),
            Strategy::Lo => false,
        }
    }
}

pub fn solve_expected_length(graph: StateGraph) -> Result<ChainAnalysis, ChainError> {
    let n = graph.states.len();
    let origin = match graph.origin {
        Target::Trm => {
            return Ok(ChainAnalysis {
                graph,
                hitting: Vec::new(),
                expected: Vec::new(),
                termination_prob: BigRational::one(),
                expected_length: ExpectedLength::Finite(BigRational::zero()),
            })
        }
        Target::State(s) => s,
    };

    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, n);
    let nodes: Vec<NodeIndex> = (0..n).map(|_| g.add_node(())).collect();
    for (i, row) in graph.transitions.iter().enumerate() {
        for to in row.keys() {
            if let Target::State(j) = to {
                g.add_edge(nodes[i], nodes[*j], ());
            }
        }
    }

    let reaches = reaches_trm(&graph);
    let mut hitting = vec![BigRational::zero(); n];
    let mut expected = vec![ExpectedLength::Infinite; n];

    // tarjan_scc yields components in reverse topological order, so every
    // edge leaving a component points at one that is already solved
    for component in tarjan_scc(&g) {
        let members: Vec<usize> = component.iter().map(|v| v.index()).collect();
        let local: HashMap<usize, usize> = members.iter().enumerate().map(|(k, &s)| (s, k)).collect();

        let live: Vec<usize> = members.iter().copied().filter(|&s| reaches[s]).collect();
        if live.is_empty() {
            continue;
        }
        debug_assert_eq!(live.len(), members.len(), "trm reachability is uniform on an SCC");

        let (a, b) = component_system(&graph, &members, &local, |to| match to {
            Target::Trm => Some(BigRational::one()),
            Target::State(j) => Some(hitting[j].clone()),
        });
        let h = linsolve::solve(&a, &b)?;
        for (k, &s) in members.iter().enumerate() {
            hitting[s] = h[k].clone();
        }

        if members.iter().all(|&s| hitting[s].is_one()) {
            let (a, mut b) = component_system(&graph, &members, &local, |to| match to {
                Target::Trm => Some(BigRational::zero()),
                Target::State(j) => expected[j].finite().cloned(),
            });
            for rhs in &mut b {
                *rhs += BigRational::one();
            }
            let k = linsolve::solve(&a, &b)?;
            for (idx, &s) in members.iter().enumerate() {
                expected[s] = ExpectedLength::Finite(k[idx].clone());
            }
        }
    }

    let termination_prob = hitting[origin].clone();
    let expected_length = expected[origin].clone();
    Ok(ChainAnalysis {
        graph,
        hitting,
        expected,
        termination_prob,
        expected_length,
    })
}

/// Builds `(I − Q_C) x = Σ_{outside} P · known` for the component `C`.
/// `known` gives the value at targets outside `C`; it is only consulted for
/// targets that a row actually reaches.
fn component_system(
    graph: &StateGraph,
    members: &[usize],
    local: &HashMap<usize, usize>,
    known: impl Fn(Target) -> Option<BigRational>,
) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    let m = members.len();
    let mut a = vec![vec![BigRational::zero(); m]; m];
    let mut b = vec![BigRational::zero(); m];
    for (r, &s) in members.iter().enumerate() {
        a[r][r] += BigRational::one();
        for (to, p) in &graph.transitions[s] {
            match to {
                Target::State(j) if local.contains_key(j) => a[r][local[j]] -= p,
                _ => {
                    let v = known(*to).expect("successor components of a terminating component are terminating");
                    b[r] += p * v;
                }
            }
        }
    }
    (a, b)
}

fn reaches_trm(graph: &StateGraph) -> Vec<bool> {
    let n = graph.states.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut reaches = vec![false; n];
    let mut queue = VecDeque::new();
    for (i, row) in graph.transitions.iter().enumerate() {
        for to in row.keys() {
            match to {
                Target::Trm => {
                    if !reaches[i] {
                        reaches[i] = true;
                        queue.push_back(i);
                    }
                }
                Target::State(j) => preds[*j].push(i),
            }
        }
    }
    while let Some(j) = queue.pop_front() {
        for &i in &preds[j] {
            if !reaches[i] {
                reaches[i] = true;
                queue.push_back(i);
            }
        }
    }
    reaches
}

/// `explore_states` followed by `solve_expected_length`.
pub fn analyze(t: &Term, strategy: &Strategy, state_cap: usize) -> Result<ChainAnalysis, ChainError> {
    solve_expected_length(explore_states(t, strategy, state_cap)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inconclusive {
    Fuel(usize),
    StateCap(usize),
}

impl fmt::Display for Inconclusive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Inconclusive::Fuel(n) => write!(f, "LO did not normalise within {n} steps"),
            Inconclusive::StateCap(n) => write!(f, "more than {n} reachable states"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive(Inconclusive),
}

/// Exact expected length under `P_ε` against the bound `N_LO(t) / ε`.
#[derive(Clone, Debug)]
pub struct FosterReport {
    pub exact: Option<ExpectedLength>,
    pub bound: Option<BigRational>,
    pub verdict: Verdict,
}

pub fn check_foster(t: &Term, eps: &Probability, fuel: usize, state_cap: usize) -> Result<FosterReport, ChainError> {
    if eps.is_zero() {
        return Err(ChainError::InvalidEpsilon);
    }
    let n_lo = match n_steps(t, Deterministic::Lo, fuel).finite() {
        Some(n) => n,
        None => {
            return Ok(FosterReport {
                exact: None,
                bound: None,
                verdict: Verdict::Inconclusive(Inconclusive::Fuel(fuel)),
            })
        }
    };
    let bound = BigRational::from_integer(n_lo.into()) / eps.value();
    let analysis = match analyze(t, &Strategy::PEps(eps.clone()), state_cap) {
        Ok(a) => a,
        Err(ChainError::StateCapExceeded { cap, .. }) => {
            return Ok(FosterReport {
                exact: None,
                bound: Some(bound),
                verdict: Verdict::Inconclusive(Inconclusive::StateCap(cap)),
            })
        }
        Err(e) => return Err(e),
    };
    let verdict = match analysis.expected_length.finite() {
        Some(e) if *e <= bound => Verdict::Holds,
        _ => Verdict::Violated,
    };
    Ok(FosterReport {
        exact: Some(analysis.expected_length),
        bound: Some(bound),
        verdict,
    })
}

/// Serialisable form of a solved chain. `trm` is the last entry of `states`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    pub origin: String,
    pub strategy: String,
    pub states: Vec<String>,
    pub transitions: Vec<TransitionRecord>,
    pub expected_length: String,
    pub termination_prob: String,
    pub outside_past_hypothesis: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionRecord {
    pub from: usize,
    pub to: usize,
    pub probability: String,
}

impl ChainAnalysis {
    pub fn report(&self) -> ChainReport {
        let g = &self.graph;
        let trm = g.states.len();
        let idx = |t: &Target| match t {
            Target::State(j) => *j,
            Target::Trm => trm,
        };
        let mut states: Vec<String> = g.states.iter().map(|s| s.representative.to_string()).collect();
        states.push("trm".to_string());
        let mut transitions: Vec<TransitionRecord> = g
            .transitions
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter().map(move |(to, p)| TransitionRecord {
                    from: i,
                    to: idx(to),
                    probability: fmt_ratio(p),
                })
            })
            .collect();
        transitions.push(TransitionRecord {
            from: trm,
            to: trm,
            probability: "1/1".to_string(),
        });
        ChainReport {
            origin: g.origin_term.to_string(),
            strategy: g.strategy.to_string(),
            states,
            transitions,
            expected_length: self.expected_length.to_string(),
            termination_prob: fmt_ratio(&self.termination_prob),
            outside_past_hypothesis: self.outside_past_hypothesis(),
        }
    }
}

impl fmt::Display for ChainReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "origin: {}", self.origin)?;
        writeln!(f, "strategy: {}", self.strategy)?;
        writeln!(f, "states: {}", self.states.len())?;
        for (i, s) in self.states.iter().enumerate() {
            writeln!(f, "  [{i}] {s}")?;
        }
        writeln!(f, "transitions:")?;
        for t in &self.transitions {
            writeln!(f, "  {} -> {}  {}", t.from, t.to, t.probability)?;
        }
        writeln!(f, "termination_prob: {}", self.termination_prob)?;
        write!(f, "expected_length: {}", self.expected_length)?;
        if self.outside_past_hypothesis {
            write!(f, "\nnote: epsilon = 0 lies outside the positive-termination theorem")?;
        }
        Ok(())
    }
}
