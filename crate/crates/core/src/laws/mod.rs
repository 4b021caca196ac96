//! Executable checks of the reduction-length laws over a corpus of terms.
//!
//! Each law inspects every corpus entry in its scope and classifies it as
//! passed, failed or inconclusive (a fuel or state cap was hit). Entries
//! outside the scope of a law are not counted.

pub mod oracle;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{analyze, check_foster, ExpectedLength, Verdict};
use crate::corpus::{mk_big_omega, mk_cn, mk_example1, mk_example2, mk_i, mk_mn, mk_omega, random_term};
use crate::error::ChainError;
use crate::strategy::{beta_successors, fmt_ratio, n_steps, Deterministic, Probability, Strategy};
use crate::term::{SubCalculusTag, Term};
use oracle::{explore, shortest_to_normal_form, Relation, Shortest};

pub const LAW_IDS: [&str; 7] = [
    "lo_monotone",
    "anf_equal_length",
    "subcalculus_stability",
    "lambdaA_lo_optimal",
    "lambdaI_anf_optimal",
    "eps_minimum",
    "foster",
];

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub label: String,
    pub term: Term,
    /// Generator seed for random entries, so a failure can be replayed.
    pub seed: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct Corpus {
    pub description: String,
    pub entries: Vec<CorpusEntry>,
}

impl Corpus {
    pub fn empty() -> Self {
        Corpus {
            description: "empty".into(),
            entries: Vec::new(),
        }
    }

    /// I, ω, Ω, both worked examples, `C_n` and `M_n` for `n ≤ 5`.
    pub fn named() -> Self {
        let mut entries = vec![
            entry("I", mk_i()),
            entry("omega", mk_omega()),
            entry("Omega", mk_big_omega()),
            entry("example1", mk_example1()),
            entry("example2", mk_example2()),
        ];
        for n in 1..=5 {
            entries.push(entry(&format!("Cn:{n}"), mk_cn(n).expect("n ≥ 1")));
        }
        for n in 1..=5 {
            entries.push(entry(&format!("Mn:{n}"), mk_mn(n).expect("n ≥ 1")));
        }
        Corpus {
            description: "named terms".into(),
            entries,
        }
    }

    /// `count` terms of each kind: unrestricted, λI that LO normalises
    /// within `fuel`, and λA. Seeds count up from `base_seed`.
    pub fn random(base_seed: u64, size_cap: usize, count: usize, fuel: usize) -> Self {
        let mut entries = Vec::with_capacity(3 * count);
        let kinds = [
            ("full", SubCalculusTag::FullLambda, false),
            ("lambdaI", SubCalculusTag::LambdaI, true),
            ("lambdaA", SubCalculusTag::LambdaA, false),
        ];
        for (name, tag, needs_wn) in kinds {
            let mut found = 0;
            let mut seed = base_seed;
            // non-normalising λI terms are rare; the bound only guards the loop
            while found < count && seed < base_seed.saturating_add(50 * count as u64 + 50) {
                let t = random_term(seed, size_cap, tag).expect("size cap ≥ 1");
                if !needs_wn || n_steps(&t, Deterministic::Lo, fuel).finite().is_some() {
                    entries.push(CorpusEntry {
                        label: format!("{name}#{seed}"),
                        term: t,
                        seed: Some(seed),
                    });
                    found += 1;
                }
                seed += 1;
            }
        }
        Corpus {
            description: format!("{count} random terms per sub-calculus, size <= {size_cap}, seed {base_seed}"),
            entries,
        }
    }

    pub fn default_corpus(base_seed: u64, size_cap: usize, count: usize, fuel: usize) -> Self {
        let mut c = Corpus::named();
        let r = Corpus::random(base_seed, size_cap, count, fuel);
        c.entries.extend(r.entries);
        c.description = format!("named terms + {}", r.description);
        c
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn entry(label: &str, term: Term) -> CorpusEntry {
    CorpusEntry {
        label: label.into(),
        term,
        seed: None,
    }
}

#[derive(Clone, Debug)]
pub struct LawConfig {
    /// LO fuel used to certify weak normalisation.
    pub fuel: usize,
    /// State cap for exact chain solves.
    pub state_cap: usize,
    /// State cap for brute-force reduction graphs.
    pub oracle_cap: usize,
    /// Positive ε values; laws that allow it add ε = 0.
    pub grid: Vec<Probability>,
}

pub fn default_grid() -> Vec<Probability> {
    [(1, 10), (1, 4), (1, 2), (3, 4), (9, 10), (1, 1)]
        .iter()
        .map(|&(n, d)| Probability::from_ratio(n, d).expect("grid point in [0,1]"))
        .collect()
}

impl Default for LawConfig {
    fn default() -> Self {
        LawConfig {
            fuel: 1000,
            state_cap: 20_000,
            oracle_cap: 5_000,
            grid: default_grid(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub label: String,
    pub term: String,
    pub details: String,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawReport {
    pub id: String,
    pub corpus: String,
    pub run: usize,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
    /// The first failing entry in corpus order.
    pub counterexample: Option<Counterexample>,
    pub warning: Option<String>,
}

impl LawReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    pub fn inconclusive_fraction(&self) -> f64 {
        if self.run == 0 {
            0.0
        } else {
            self.inconclusive as f64 / self.run as f64
        }
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if !self.ok() {
            "FAIL"
        } else if self.inconclusive > 0 {
            "pass*"
        } else {
            "pass"
        };
        write!(
            f,
            "{:<24} {:<6} run {:>4}  passed {:>4}  failed {:>3}  inconclusive {:>3}",
            self.id, status, self.run, self.passed, self.failed, self.inconclusive
        )?;
        if let Some(w) = &self.warning {
            write!(f, "\n  warning: {w}")?;
        }
        if let Some(c) = &self.counterexample {
            write!(f, "\n  counterexample {} `{}`: {}", c.label, c.term, c.details)?;
            if let Some(seed) = c.seed {
                write!(f, " (seed {seed})")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(String),
    Inconclusive(String),
    OutOfScope,
}

fn run(id: &str, corpus: &Corpus, check: impl Fn(&Term) -> Outcome + Sync) -> LawReport {
    let outcomes: Vec<Outcome> = corpus.entries.par_iter().map(|e| check(&e.term)).collect();
    let mut report = LawReport {
        id: id.into(),
        corpus: corpus.description.clone(),
        run: 0,
        passed: 0,
        failed: 0,
        inconclusive: 0,
        counterexample: None,
        warning: None,
    };
    for (e, o) in corpus.entries.iter().zip(outcomes) {
        match o {
            Outcome::OutOfScope => continue,
            Outcome::Pass => report.passed += 1,
            Outcome::Inconclusive(_) => report.inconclusive += 1,
            Outcome::Fail(details) => {
                report.failed += 1;
                report.counterexample.get_or_insert(Counterexample {
                    label: e.label.clone(),
                    term: e.term.to_string(),
                    details,
                    seed: e.seed,
                });
            }
        }
        report.run += 1;
    }
    if report.run == 0 {
        report.warning = Some("no corpus entry is in scope; passed vacuously".into());
    }
    report
}

fn n_lo(t: &Term, fuel: usize) -> Option<usize> {
    n_steps(t, Deterministic::Lo, fuel).finite()
}

/// `N_LO(u) ≤ N_LO(t)` for every one-step reduct `u` of a normalising `t`.
pub fn law_lo_monotone(corpus: &Corpus, cfg: &LawConfig) -> LawReport {
    run("lo_monotone", corpus, |t| lo_monotone(t, cfg))
}

pub fn lo_monotone(t: &Term, cfg: &LawConfig) -> Outcome {
    let Some(n) = n_lo(t, cfg.fuel) else {
        return Outcome::OutOfScope;
    };
    for u in beta_successors(t) {
        match n_lo(&u, n + 1) {
            Some(m) if m <= n => {}
            Some(m) => return Outcome::Fail(format!("reduct `{u}` needs {m} LO steps, more than {n}")),
            None => return Outcome::Fail(format!("reduct `{u}` needs more than {n} LO steps")),
        }
    }
    Outcome::Pass
}

/// All β-ANF sequences to normal form have the same length.
pub fn law_anf_equal_length(corpus: &Corpus, cfg: &LawConfig) -> LawReport {
    run("anf_equal_length", corpus, |t| anf_equal_length(t, cfg))
}

pub fn anf_equal_length(t: &Term, cfg: &LawConfig) -> Outcome {
    if n_lo(t, cfg.fuel).is_none() {
        return Outcome::OutOfScope;
    }
    let g = explore(t, Relation::Anf, cfg.oracle_cap);
    if !g.complete {
        return Outcome::Inconclusive(format!("ANF graph exceeds {} states", cfg.oracle_cap));
    }
    match g.lengths_to_normal_form() {
        Err(_) => Outcome::Fail("an ANF cycle still reaches a normal form".into()),
        Ok(Some((lo, hi))) if lo != hi => Outcome::Fail(format!("ANF sequences of lengths {lo} and {hi}")),
        Ok(Some((len, _))) => match n_steps(t, Deterministic::Ri, cfg.fuel).finite() {
            Some(ri) if ri != len => Outcome::Fail(format!("RI takes {ri} steps, other ANF sequences {len}")),
            _ => Outcome::Pass,
        },
        Ok(None) => Outcome::Pass,
    }
}

/// λI is closed under β with free variables preserved; λA is closed under β
/// and strongly normalising.
pub fn law_subcalculus_stability(corpus: &Corpus, cfg: &LawConfig) -> LawReport {
    run("subcalculus_stability", corpus, |t| subcalculus_stability(t, cfg))
}

pub fn subcalculus_stability(t: &Term, cfg: &LawConfig) -> Outcome {
    let (is_i, is_a) = (t.is_lambda_i(), t.is_lambda_a());
    if !is_i && !is_a {
        return Outcome::OutOfScope;
    }
    let fv = t.free_vars();
    if is_i {
        for u in beta_successors(t) {
            if !u.is_lambda_i() {
                return Outcome::Fail(format!("reduct `{u}` leaves λI"));
            }
            if u.free_vars() != fv {
                return Outcome::Fail(format!("reduct `{u}` changes the free variables"));
            }
        }
    }
    if is_a {
        let g = explore(t, Relation::Beta, cfg.oracle_cap);
        if !g.complete {
            return Outcome::Inconclusive(format!("reduction graph exceeds {} states", cfg.oracle_cap));
        }
        for c in &g.states {
            let u = c.to_term();
            if !u.is_lambda_a() {
                return Outcome::Fail(format!("reachable `{u}` leaves λA"));
            }
            if !u.free_vars().is_subset(&fv) {
                return Outcome::Fail(format!("reachable `{u}` gains free variables"));
            }
        }
        if g.has_cycle() {
            return Outcome::Fail("an infinite reduction sequence exists".into());
        }
    }
    Outcome::Pass
}

/// In λA no reduction sequence to normal form is shorter than LO's.
pub fn law_lambda_a_lo_optimal(corpus: &Corpus, cfg: &LawConfig) -> LawReport {
    run("lambdaA_lo_optimal", corpus, |t| lambda_a_lo_optimal(t, cfg))
}

pub fn lambda_a_lo_optimal(t: &Term, cfg: &LawConfig) -> Outcome {
    if !t.is_lambda_a() {
        return Outcome::OutOfScope;
    }
    let Some(n) = n_lo(t, cfg.fuel) else {
        return Outcome::Fail(format!("LO does not normalise within {} steps", cfg.fuel));
    };
    if n == 0 {
        return Outcome::Pass;
    }
    match shortest_to_normal_form(t, Relation::Beta, n - 1, cfg.oracle_cap) {
        Shortest::Found(d) => Outcome::Fail(format!("a normal form {d} steps away, LO takes {n}")),
        Shortest::NoneWithin(_) => Outcome::Pass,
        Shortest::Capped => Outcome::Inconclusive(format!("search exceeds {} states", cfg.oracle_cap)),
    }
}

/// In λI no reduction sequence to normal form is shorter than a β-ANF one.
pub fn law_lambda_i_anf_optimal(corpus: &Corpus, cfg: &LawConfig) -> LawReport {
    run("lambdaI_anf_optimal", corpus, |t| lambda_i_anf_optimal(t, cfg))
}

pub fn lambda_i_anf_optimal(t: &Term, cfg: &LawConfig) -> Outcome {
    if !t.is_lambda_i() || n_lo(t, cfg.fuel).is_none() {
        return Outcome::OutOfScope;
    }
    // RI only contracts ANF redexes
    let Some(m) = n_steps(t, Deterministic::Ri, cfg.fuel).finite() else {
        return Outcome::Inconclusive(format!("RI does not normalise within {} steps", cfg.fuel));
    };
    if m == 0 {
        return Outcome::Pass;
    }
    match shortest_to_normal_form(t, Relation::Beta, m - 1, cfg.oracle_cap) {
        Shortest::Found(d) => Outcome::Fail(format!("a normal form {d} steps away, ANF takes {m}")),
        Shortest::NoneWithin(_) => Outcome::Pass,
        Shortest::Capped => Outcome::Inconclusive(format!("search exceeds {} states", cfg.oracle_cap)),
    }
}

/// Over the grid, the exact expected length under `P_ε` is smallest at
/// ε = 1 for λA terms and at ε = 0 for normalising λI terms.
pub fn law_eps_minimum(corpus: &Corpus, cfg: &LawConfig) -> LawReport {
    run("eps_minimum", corpus, |t| eps_minimum(t, cfg))
}

/// The grid with ε = 0 added, ascending.
pub fn grid_with_zero(grid: &[Probability]) -> Vec<Probability> {
    let mut g: Vec<Probability> = grid.to_vec();
    g.push(Probability::zero());
    g.sort_by(|a, b| a.value().cmp(b.value()));
    g.dedup();
    g
}

/// Exact expected lengths over `grid`, or the first cap hit.
pub fn eps_profile(t: &Term, grid: &[Probability], state_cap: usize) -> Result<Vec<ExpectedLength>, ChainError> {
    grid.iter()
        .map(|eps| analyze(t, &Strategy::PEps(eps.clone()), state_cap).map(|a| a.expected_length))
        .collect()
}

fn le(a: &ExpectedLength, b: &ExpectedLength) -> bool {
    match (a, b) {
        (_, ExpectedLength::Infinite) => true,
        (ExpectedLength::Infinite, _) => false,
        (ExpectedLength::Finite(x), ExpectedLength::Finite(y)) => x <= y,
    }
}

pub fn eps_minimum(t: &Term, cfg: &LawConfig) -> Outcome {
    let want_one = t.is_lambda_a();
    let want_zero = t.is_lambda_i() && n_lo(t, cfg.fuel).is_some();
    if !want_one && !want_zero {
        return Outcome::OutOfScope;
    }
    let grid = grid_with_zero(&cfg.grid);
    let profile = match eps_profile(t, &grid, cfg.state_cap) {
        Ok(p) => p,
        Err(ChainError::StateCapExceeded { cap, .. }) => {
            return Outcome::Inconclusive(format!("chain exceeds {cap} states"))
        }
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let table = || {
        grid.iter()
            .zip(&profile)
            .map(|(e, v)| format!("{e}:{v}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    for (target, wanted) in [(Probability::one(), want_one), (Probability::zero(), want_zero)] {
        if !wanted {
            continue;
        }
        let Some(k) = grid.iter().position(|e| *e == target) else {
            continue;
        };
        let best = &profile[k];
        if best.finite().is_none() || !profile.iter().all(|v| le(best, v)) {
            return Outcome::Fail(format!("minimum not at ε = {target}: {}", table()));
        }
    }
    Outcome::Pass
}

/// `E ≤ N_LO / ε` for every normalising term and every positive grid ε.
pub fn law_foster(corpus: &Corpus, cfg: &LawConfig) -> LawReport {
    run("foster", corpus, |t| foster(t, cfg))
}

pub fn foster(t: &Term, cfg: &LawConfig) -> Outcome {
    if n_lo(t, cfg.fuel).is_none() {
        return Outcome::OutOfScope;
    }
    for eps in cfg.grid.iter().filter(|e| !e.is_zero()) {
        match check_foster(t, eps, cfg.fuel, cfg.state_cap) {
            Ok(r) => match r.verdict {
                Verdict::Holds => {}
                Verdict::Violated => {
                    let exact = r.exact.map(|e| e.to_string()).unwrap_or_default();
                    let bound = r.bound.as_ref().map(fmt_ratio).unwrap_or_default();
                    return Outcome::Fail(format!("ε = {eps}: expected {exact} exceeds {bound}"));
                }
                Verdict::Inconclusive(why) => return Outcome::Inconclusive(format!("ε = {eps}: {why}")),
            },
            Err(e) => return Outcome::Fail(format!("ε = {eps}: {e}")),
        }
    }
    Outcome::Pass
}

/// Runs the law named `id`, `None` if there is no such law.
pub fn run_law(id: &str, corpus: &Corpus, cfg: &LawConfig) -> Option<LawReport> {
    let id = id.strip_prefix("law_").unwrap_or(id);
    Some(match id {
        "lo_monotone" => law_lo_monotone(corpus, cfg),
        "anf_equal_length" => law_anf_equal_length(corpus, cfg),
        "subcalculus_stability" => law_subcalculus_stability(corpus, cfg),
        "lambdaA_lo_optimal" => law_lambda_a_lo_optimal(corpus, cfg),
        "lambdaI_anf_optimal" => law_lambda_i_anf_optimal(corpus, cfg),
        "eps_minimum" => law_eps_minimum(corpus, cfg),
        "foster" => law_foster(corpus, cfg),
        _ => return None,
    })
}

pub fn run_all(corpus: &Corpus, cfg: &LawConfig) -> Vec<LawReport> {
    LAW_IDS
        .iter()
        .map(|id| run_law(id, corpus, cfg).expect("known law"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    fn cfg() -> LawConfig {
        LawConfig::default()
    }

    #[test]
    fn lo_monotone_instances() {
        assert_eq!(lo_monotone(&mk_example1(), &cfg()), Outcome::Pass);
        assert_eq!(lo_monotone(&mk_i(), &cfg()), Outcome::Pass);
        assert_eq!(lo_monotone(&mk_example2(), &cfg()), Outcome::Pass);
        assert_eq!(lo_monotone(&mk_big_omega(), &cfg()), Outcome::OutOfScope);
    }

    #[test]
    fn anf_equal_length_instances() {
        assert_eq!(anf_equal_length(&mk_example2(), &cfg()), Outcome::Pass);
        assert_eq!(anf_equal_length(&mk_i(), &cfg()), Outcome::Pass);
        assert_eq!(anf_equal_length(&t(r"(\x.x) ((\x.x) (\x.x))"), &cfg()), Outcome::Pass);
    }

    #[test]
    fn anf_lengths_differ_once_an_argument_is_erased() {
        // inner redex first: 2 steps. Root first turns the normal argument
        // `x x` into the redex `I I`, leaving 3 ANF steps.
        let m = t(r"(\x.(\y.c) (x x)) (\x.x)");
        let g = explore(&m, Relation::Anf, 100);
        assert_eq!(g.lengths_to_normal_form(), Ok(Some((2, 3))));
        assert!(matches!(anf_equal_length(&m, &cfg()), Outcome::Fail(_)));
    }

    #[test]
    fn stability_instances() {
        assert_eq!(subcalculus_stability(&mk_big_omega(), &cfg()), Outcome::Pass);
        assert_eq!(subcalculus_stability(&t(r"(\x.\y.y) ((\z.z) a)"), &cfg()), Outcome::Pass);
        assert!(!mk_example1().is_lambda_i());
        assert!(!mk_example1().is_lambda_a());
        assert_eq!(subcalculus_stability(&mk_example1(), &cfg()), Outcome::OutOfScope);
    }

    #[test]
    fn optimality_instances() {
        // λA: K-like erasure, LO takes 1 step, inner-first takes 2
        let k = t(r"(\x.\y.y) ((\z.z) a)");
        assert_eq!(lambda_a_lo_optimal(&k, &cfg()), Outcome::Pass);
        // λI: duplication makes RI strictly better than LO
        assert_eq!(lambda_i_anf_optimal(&mk_example2(), &cfg()), Outcome::Pass);
        assert_eq!(lambda_i_anf_optimal(&mk_big_omega(), &cfg()), Outcome::OutOfScope);
    }

    #[test]
    fn eps_minimum_instances() {
        assert_eq!(eps_minimum(&mk_example2(), &cfg()), Outcome::Pass);
        assert_eq!(eps_minimum(&t(r"(\x.\y.y) ((\z.z) a)"), &cfg()), Outcome::Pass);
        assert_eq!(eps_minimum(&mk_i(), &cfg()), Outcome::Pass);
        assert_eq!(eps_minimum(&mk_example1(), &cfg()), Outcome::OutOfScope);
    }

    #[test]
    fn detects_a_broken_claim() {
        // ε = 1 is not the minimum outside λA: LO duplicates work here
        let grid = grid_with_zero(&default_grid());
        let p = eps_profile(&mk_example2(), &grid, 100).unwrap();
        assert!(!le(&p[grid.len() - 1], &p[0]));
    }

    #[test]
    fn foster_instances() {
        assert_eq!(foster(&mk_example1(), &cfg()), Outcome::Pass);
        assert_eq!(foster(&mk_example2(), &cfg()), Outcome::Pass);
        assert_eq!(foster(&mk_i(), &cfg()), Outcome::Pass);
    }

    #[test]
    fn named_corpus_passes_every_law() {
        let corpus = Corpus::named();
        for r in run_all(&corpus, &cfg()) {
            assert!(r.ok(), "{r}");
            assert_eq!(r.inconclusive, 0, "{r}");
            assert!(r.run > 0, "{r}");
        }
    }

    #[test]
    fn empty_corpus_is_vacuous() {
        let r = law_foster(&Corpus::empty(), &cfg());
        assert_eq!(r.run, 0);
        assert!(r.ok());
        assert!(r.warning.is_some());
    }

    #[test]
    fn reports_are_reproducible() {
        let c = Corpus::random(3, 8, 10, 200);
        assert_eq!(c.len(), 30);
        let a = run_all(&c, &cfg());
        let b = run_all(&Corpus::random(3, 8, 10, 200), &cfg());
        assert_eq!(a, b);
        assert!(run_law("law_foster", &c, &cfg()).is_some());
        assert!(run_law("nope", &c, &cfg()).is_none());
    }

    #[test]
    fn failures_carry_the_seed() {
        let c = Corpus::random(0, 8, 3, 200);
        let r = run("always_fails", &c, |_| Outcome::Fail("boom".into()));
        let ce = r.counterexample.unwrap();
        assert_eq!(ce.seed, Some(0));
        assert_eq!(ce.label, "full#0");
        assert_eq!(r.failed, 9);
    }
}
