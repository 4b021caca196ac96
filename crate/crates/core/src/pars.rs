//! Evolution of configurations (partial distributions over terms) under a
//! probabilistic strategy, and the quantities read off the mass sequence.
//!
//! Normal forms have no outgoing transitions, so the mass sitting on them
//! leaves the configuration at the next step. Hence `|ρ_k|` is the
//! probability that the run has not terminated before step `k`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::canonical::CanonicalTerm;
use crate::strategy::{Distribution, Strategy};
use crate::term::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub distribution: Distribution,
    pub step: usize,
}

impl Configuration {
    pub fn dirac(t: &Term) -> Self {
        Configuration {
            distribution: Distribution::dirac(t.canonicalize()),
            step: 0,
        }
    }

    pub fn mass(&self) -> BigRational {
        self.distribution.total_mass()
    }
}

/// One application of `σ(s) = Σ_t ρ(t) · P(t → s)`.
pub fn evolve(rho: &Configuration, strategy: &Strategy) -> Configuration {
    Evolver::new(strategy.clone()).evolve(rho)
}

/// Evolution with a memo of per-state successor distributions.
pub struct Evolver {
    strategy: Strategy,
    cache: HashMap<CanonicalTerm, Option<Distribution>>,
}

impl Evolver {
    pub fn new(strategy: Strategy) -> Self {
        Evolver {
            strategy,
            cache: HashMap::new(),
        }
    }

    fn successors(&mut self, state: &CanonicalTerm) -> &Option<Distribution> {
        let strategy = &self.strategy;
        self.cache
            .entry(state.clone())
            .or_insert_with(|| strategy.distribution(&state.to_term()))
    }

    pub fn evolve(&mut self, rho: &Configuration) -> Configuration {
        let mut next = Distribution::new();
        for (state, mass) in rho.distribution.iter() {
            if let Some(mu) = self.successors(state) {
                for (target, p) in mu.iter() {
                    next.add(target.clone(), mass * p);
                }
            }
        }
        Configuration {
            distribution: next,
            step: rho.step + 1,
        }
    }
}

/// The masses `|ρ_0|, ..., |ρ_H|` of a run started from a Dirac configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvolutionTrace {
    pub masses: Vec<BigRational>,
}

impl EvolutionTrace {
    pub fn horizon(&self) -> usize {
        self.masses.len().saturating_sub(1)
    }

    pub fn trailing_mass(&self) -> BigRational {
        self.masses.last().cloned().unwrap_or_else(BigRational::zero)
    }
}

/// Iterates `evolve` from the Dirac configuration on `t`.
///
/// Every transition probability of the strategy has a denominator dividing
/// `b`, the denominator of its LO weight, so `ρ_k` is kept as integer
/// numerators over `b^k` and only the total mass is normalised.
pub fn evolve_trace(t: &Term, strategy: &Strategy, horizon: usize) -> EvolutionTrace {
    let scale = strategy.lo_weight().denom().clone();
    let scale_ratio = BigRational::from_integer(scale.clone());
    let mut successors: HashMap<CanonicalTerm, Vec<(CanonicalTerm, BigInt)>> = HashMap::new();
    let mut rho: HashMap<CanonicalTerm, BigInt> = HashMap::from([(t.canonicalize(), BigInt::one())]);
    let mut denom = BigInt::one();
    let mut masses = vec![BigRational::one()];
    while masses.len() <= horizon {
        if rho.is_empty() {
            masses.push(BigRational::zero());
            continue;
        }
        let mut next: HashMap<CanonicalTerm, BigInt> = HashMap::new();
        for (state, m) in &rho {
            let row = successors.entry(state.clone()).or_insert_with(|| {
                strategy
                    .distribution(&state.to_term())
                    .map(|mu| {
                        mu.iter()
                            .map(|(c, p)| {
                                let w = p * &scale_ratio;
                                debug_assert!(w.is_integer());
                                (c.clone(), w.to_integer())
                            })
                            .collect()
                    })
                    .unwrap_or_default()
            });
            for (target, w) in row.iter() {
                *next.entry(target.clone()).or_insert_with(BigInt::zero) += m * w;
            }
        }
        denom *= &scale;
        rho = next;
        let total: BigInt = rho.values().sum();
        masses.push(BigRational::new(total, denom.clone()));
    }
    EvolutionTrace { masses }
}

/// `Der(i) = |ρ_i| − |ρ_{i+1}|` for `i < H`: the probability of reaching
/// normal form in exactly `i` steps.
pub fn derivation_length_dist(trace: &EvolutionTrace) -> Vec<BigRational> {
    trace.masses.windows(2).map(|w| &w[0] - &w[1]).collect()
}

/// Partial sum `Σ_{i=1..H} |ρ_i|` of the expected derivation length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedLength {
    /// A lower bound on the expected length, exact when `trailing_mass` is 0.
    pub value: BigRational,
    /// `|ρ_H|`: probability mass still running at the horizon.
    pub trailing_mass: BigRational,
}

impl TruncatedLength {
    pub fn is_exact(&self) -> bool {
        self.trailing_mass.is_zero()
    }
}

pub fn expected_length_truncated(trace: &EvolutionTrace) -> TruncatedLength {
    let value = trace
        .masses
        .iter()
        .skip(1)
        .fold(BigRational::zero(), |acc, m| acc + m);
    TruncatedLength {
        value,
        trailing_mass: trace.trailing_mass(),
    }
}
