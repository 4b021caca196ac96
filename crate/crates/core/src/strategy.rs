//! Deterministic strategies LO and RI, β-ANF reduction, and the randomised
//! strategy `P_ε`, which contracts the leftmost-outermost redex with
//! probability ε and the rightmost-innermost one with probability 1 − ε.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::canonical::CanonicalTerm;
use crate::error::{ChainError, ProbabilityError};
use crate::term::Term;

pub const DEFAULT_FUEL: usize = 10_000;

/// An exact rational in `[0, 1]`, kept in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Probability(BigRational);

impl Probability {
    pub fn new(value: BigRational) -> Result<Self, ProbabilityError> {
        if value.is_negative() || value > BigRational::one() {
            return Err(ProbabilityError::OutOfRange(fmt_ratio(&value)));
        }
        Ok(Probability(value))
    }

    pub fn from_ratio(num: u64, den: u64) -> Result<Self, ProbabilityError> {
        if den == 0 {
            return Err(ProbabilityError::ZeroDenominator);
        }
        Probability::new(BigRational::new(num.into(), den.into()))
    }

    pub fn zero() -> Self {
        Probability(BigRational::zero())
    }

    pub fn one() -> Self {
        Probability(BigRational::one())
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn into_inner(self) -> BigRational {
        self.0
    }

    pub fn complement(&self) -> Probability {
        Probability(BigRational::one() - &self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.0)
    }
}

/// Accepts `num/den`, `0` and `1`. Decimal notation is rejected so that
/// every ε is exact.
impl FromStr for Probability {
    type Err = ProbabilityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let malformed = || ProbabilityError::Malformed(s.to_string());
        let digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
        match s.split_once('/') {
            None if s == "0" => Ok(Probability::zero()),
            None if s == "1" => Ok(Probability::one()),
            None => Err(malformed()),
            Some((n, d)) if digits(n) && digits(d) => {
                let n: BigInt = n.parse().map_err(|_| malformed())?;
                let d: BigInt = d.parse().map_err(|_| malformed())?;
                if d.is_zero() {
                    return Err(ProbabilityError::ZeroDenominator);
                }
                Probability::new(BigRational::new(n, d))
            }
            Some(_) => Err(malformed()),
        }
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_ratio(&self.0))
    }
}

impl fmt::Debug for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `num/den`, always with an explicit denominator.
pub fn fmt_ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// A (partial) probability distribution over α-classes of terms. Only
/// positive masses are stored.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Distribution {
    masses: BTreeMap<CanonicalTerm, BigRational>,
}

impl Distribution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dirac(state: CanonicalTerm) -> Self {
        let mut d = Self::new();
        d.add(state, BigRational::one());
        d
    }

    /// Adds `mass` to `state`; zero masses are dropped.
    pub fn add(&mut self, state: CanonicalTerm, mass: BigRational) {
        if mass.is_zero() {
            return;
        }
        *self.masses.entry(state).or_insert_with(BigRational::zero) += mass;
    }

    pub fn get(&self, state: &CanonicalTerm) -> BigRational {
        self.masses.get(state).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total_mass(&self) -> BigRational {
        self.masses.values().fold(BigRational::zero(), |acc, m| acc + m)
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CanonicalTerm, &BigRational)> {
        self.masses.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &CanonicalTerm> {
        self.masses.keys()
    }
}

impl fmt::Debug for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.masses.iter().map(|(k, v)| (k.to_string(), fmt_ratio(v))))
            .finish()
    }
}

/// A reduction strategy: deterministic LO or RI, or `P_ε`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Strategy {
    Lo,
    Ri,
    PEps(Probability),
}

impl Strategy {
    /// Probability of picking the LO-redex when LO and RI differ.
    pub fn lo_weight(&self) -> Probability {
        match self {
            Strategy::Lo => Probability::one(),
            Strategy::Ri => Probability::zero(),
            Strategy::PEps(eps) => eps.clone(),
        }
    }

    /// The strategy's distribution over successors, `None` on normal forms.
    pub fn distribution(&self, t: &Term) -> Option<Distribution> {
        match self {
            Strategy::Lo => step_lo(t).map(|u| Distribution::dirac(u.canonicalize())),
            Strategy::Ri => step_ri(t).map(|u| Distribution::dirac(u.canonicalize())),
            Strategy::PEps(eps) => p_eps(t, eps),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Lo => f.write_str("lo"),
            Strategy::Ri => f.write_str("ri"),
            Strategy::PEps(eps) => write!(f, "peps:{eps}"),
        }
    }
}

impl fmt::Debug for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `lo`, `ri` or `peps:<num>/<den>`.
impl FromStr for Strategy {
    type Err = ProbabilityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lo" => Ok(Strategy::Lo),
            "ri" => Ok(Strategy::Ri),
            _ => match s.strip_prefix("peps:") {
                Some(eps) => Ok(Strategy::PEps(eps.parse()?)),
                None => Err(ProbabilityError::Malformed(s.to_string())),
            },
        }
    }
}

pub fn step_lo(t: &Term) -> Option<Term> {
    let p = t.leftmost_redex()?;
    Some(t.reduce_at(&p).expect("leftmost redex path is valid"))
}

pub fn step_ri(t: &Term) -> Option<Term> {
    let p = t.rightmost_redex()?;
    Some(t.reduce_at(&p).expect("rightmost redex path is valid"))
}

/// One-step β-reducts, deduplicated up to α, in redex order.
pub fn beta_successors(t: &Term) -> Vec<Term> {
    dedup_alpha(t.beta_reducts())
}

/// One-step β-ANF reducts (the contracted redex has a normal argument),
/// deduplicated up to α, in redex order.
pub fn anf_successors(t: &Term) -> Vec<Term> {
    let reducts = t
        .redexes()
        .into_iter()
        .filter(|p| t.is_anf_redex(p).expect("enumerated redex"))
        .map(|p| t.reduce_at(&p).expect("enumerated redex"))
        .collect();
    dedup_alpha(reducts)
}

fn dedup_alpha(terms: Vec<Term>) -> Vec<Term> {
    let mut seen = std::collections::HashSet::new();
    terms
        .into_iter()
        .filter(|u| seen.insert(u.canonicalize()))
        .collect()
}

/// `P_ε(t)`: mass ε on the LO-reduct and 1 − ε on the RI-reduct, merged when
/// they are α-equal. A term with a single redex gets a Dirac distribution.
pub fn p_eps(t: &Term, eps: &Probability) -> Option<Distribution> {
    let lo = t.leftmost_redex()?;
    let ri = t.rightmost_redex().expect("a term with a redex has a last one");
    let lo_reduct = t.reduce_at(&lo).expect("valid path").canonicalize();
    if lo == ri {
        return Some(Distribution::dirac(lo_reduct));
    }
    let ri_reduct = t.reduce_at(&ri).expect("valid path").canonicalize();
    let mut mu = Distribution::new();
    mu.add(lo_reduct, eps.value().clone());
    mu.add(ri_reduct, eps.complement().into_inner());
    Some(mu)
}

/// Length of a deterministic run to normal form, or fuel exhaustion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepCount {
    Finite(usize),
    FuelExhausted(usize),
}

impl StepCount {
    pub fn finite(self) -> Option<usize> {
        match self {
            StepCount::Finite(n) => Some(n),
            StepCount::FuelExhausted(_) => None,
        }
    }
}

impl fmt::Display for StepCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepCount::Finite(n) => write!(f, "{n}"),
            StepCount::FuelExhausted(_) => f.write_str("div"),
        }
    }
}

/// Which deterministic strategy `n_steps` follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Deterministic {
    Lo,
    Ri,
}

impl Deterministic {
    pub fn step(self, t: &Term) -> Option<Term> {
        match self {
            Deterministic::Lo => step_lo(t),
            Deterministic::Ri => step_ri(t),
        }
    }
}

/// `N_S(t)`: steps to normal form under LO or RI, bounded by `fuel`.
pub fn n_steps(t: &Term, strategy: Deterministic, fuel: usize) -> StepCount {
    let mut cur = t.clone();
    for n in 0..=fuel {
        match strategy.step(&cur) {
            None => return StepCount::Finite(n),
            Some(next) if n < fuel => cur = next,
            Some(_) => break,
        }
    }
    StepCount::FuelExhausted(fuel)
}

/// The reduction sequence a deterministic strategy takes, excluding `t`
/// itself, stopping at normal form or after `fuel` steps.
pub fn trace(t: &Term, strategy: Deterministic, fuel: usize) -> (Vec<Term>, StepCount) {
    let mut out = Vec::new();
    let mut cur = t.clone();
    while out.len() < fuel {
        match strategy.step(&cur) {
            Some(next) => {
                out.push(next.clone());
                cur = next;
            }
            None => {
                let n = out.len();
                return (out, StepCount::Finite(n));
            }
        }
    }
    let count = if cur.is_normal_form() {
        StepCount::Finite(out.len())
    } else {
        StepCount::FuelExhausted(fuel)
    };
    (out, count)
}

/// Upper bound `N_LO(t) / ε` on the expected derivation length under `P_ε`;
/// `Ok(None)` when LO does not normalise `t` within `fuel`.
pub fn foster_bound(t: &Term, eps: &Probability, fuel: usize) -> Result<Option<BigRational>, ChainError> {
    if eps.is_zero() {
        return Err(ChainError::InvalidEpsilon);
    }
    Ok(n_steps(t, Deterministic::Lo, fuel)
        .finite()
        .map(|n| BigRational::from_integer(n.into()) / eps.value()))
}
