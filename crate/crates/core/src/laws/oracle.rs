//! Brute-force reduction graphs over α-classes, used as oracles by the laws.
//!
//! Every enumeration is capped. A capped graph is marked incomplete and the
//! caller reports the case as inconclusive.

use std::collections::{HashMap, VecDeque};

use petgraph::algo::toposort;
use petgraph::graph::DiGraph;

use crate::canonical::CanonicalTerm;
use crate::strategy::{anf_successors, beta_successors};
use crate::term::Term;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Beta,
    /// β-steps whose argument is already normal.
    Anf,
}

impl Relation {
    fn successors(self, t: &Term) -> Vec<Term> {
        match self {
            Relation::Beta => beta_successors(t),
            Relation::Anf => anf_successors(t),
        }
    }
}

/// The reachable reduction graph of a term. State 0 is the start.
#[derive(Clone, Debug)]
pub struct ReductionGraph {
    pub states: Vec<CanonicalTerm>,
    pub edges: Vec<Vec<usize>>,
    /// False when exploration stopped at the state cap.
    pub complete: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CycleFound;

pub fn explore(t: &Term, relation: Relation, cap: usize) -> ReductionGraph {
    let mut graph = ReductionGraph {
        states: vec![t.canonicalize()],
        edges: Vec::new(),
        complete: true,
    };
    let mut index: HashMap<CanonicalTerm, usize> = HashMap::new();
    index.insert(graph.states[0].clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let mut row = Vec::new();
        for u in relation.successors(&graph.states[s].to_term()) {
            let c = u.canonicalize();
            let j = match index.get(&c) {
                Some(&j) => j,
                None => {
                    if graph.states.len() >= cap {
                        graph.complete = false;
                        return graph;
                    }
                    let j = graph.states.len();
                    index.insert(c.clone(), j);
                    graph.states.push(c);
                    queue.push_back(j);
                    j
                }
            };
            row.push(j);
        }
        debug_assert_eq!(graph.edges.len(), s);
        graph.edges.push(row);
    }
    graph
}

impl ReductionGraph {
    fn digraph(&self, keep: impl Fn(usize) -> bool) -> DiGraph<(), ()> {
        let mut g = DiGraph::new();
        let nodes: Vec<_> = (0..self.states.len()).map(|_| g.add_node(())).collect();
        for (i, row) in self.edges.iter().enumerate() {
            for &j in row {
                if keep(i) && keep(j) {
                    g.add_edge(nodes[i], nodes[j], ());
                }
            }
        }
        g
    }

    /// Whether some reduction sequence from the start is infinite. Only
    /// meaningful on a complete graph, where this is a cycle check.
    pub fn has_cycle(&self) -> bool {
        toposort(&self.digraph(|_| true), None).is_err()
    }

    /// `(shortest, longest)` lengths of the sequences from the start that
    /// end in a normal form, `None` if there are none. A cycle through
    /// states that still reach a normal form makes the lengths unbounded.
    pub fn lengths_to_normal_form(&self) -> Result<Option<(usize, usize)>, CycleFound> {
        let n = self.states.len();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, row) in self.edges.iter().enumerate() {
            for &j in row {
                preds[j].push(i);
            }
        }
        let mut reaches = vec![false; n];
        let mut queue: VecDeque<usize> = (0..n).filter(|&s| self.states[s].is_normal_form()).collect();
        for &s in &queue {
            reaches[s] = true;
        }
        while let Some(j) = queue.pop_front() {
            for &i in &preds[j] {
                if !reaches[i] {
                    reaches[i] = true;
                    queue.push_back(i);
                }
            }
        }
        if !reaches[0] {
            return Ok(None);
        }
        let g = self.digraph(|s| reaches[s]);
        let order = toposort(&g, None).map_err(|_| CycleFound)?;
        let mut span: Vec<Option<(usize, usize)>> = vec![None; n];
        for v in order.into_iter().rev() {
            let s = v.index();
            if !reaches[s] {
                continue;
            }
            if self.states[s].is_normal_form() {
                span[s] = Some((0, 0));
                continue;
            }
            span[s] = self.edges[s]
                .iter()
                .filter_map(|&j| span[j])
                .map(|(lo, hi)| (lo + 1, hi + 1))
                .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)));
        }
        Ok(span[0])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shortest {
    /// A normal form at this depth, and none shallower.
    Found(usize),
    /// No normal form within the depth limit.
    NoneWithin(usize),
    Capped,
}

/// Level-by-level search for the nearest normal form, up to `depth_limit`.
pub fn shortest_to_normal_form(t: &Term, relation: Relation, depth_limit: usize, cap: usize) -> Shortest {
    let start = t.canonicalize();
    if start.is_normal_form() {
        return Shortest::Found(0);
    }
    let mut seen: HashMap<CanonicalTerm, ()> = HashMap::new();
    seen.insert(start.clone(), ());
    let mut level = vec![start];
    for depth in 1..=depth_limit {
        let mut next = Vec::new();
        for c in &level {
            for u in relation.successors(&c.to_term()) {
                let c = u.canonicalize();
                if c.is_normal_form() {
                    return Shortest::Found(depth);
                }
                if seen.insert(c.clone(), ()).is_none() {
                    if seen.len() > cap {
                        return Shortest::Capped;
                    }
                    next.push(c);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        level = next;
    }
    Shortest::NoneWithin(depth_limit)
}
