//! One-command reproduction of the reference numbers, item by item.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use peps_core::chain::analyze;
use peps_core::corpus::{mk_example1, mk_example2, mk_mn};
use peps_core::laws::{self, grid_with_zero, Corpus, LawConfig, LawReport};
use peps_core::montecarlo::estimate;
use peps_core::pars::{derivation_length_dist, evolve_trace, expected_length_truncated};
use peps_core::strategy::{fmt_ratio, n_steps, trace, Deterministic, StepCount};
use peps_core::{parse, ExpectedLength, Probability, Strategy, Term};
use rayon::prelude::*;
use serde::Serialize;

use crate::decimal::significant;

#[derive(Clone, Debug, Serialize)]
pub struct Item {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub lines: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct ReproConfig {
    pub seed: u64,
    pub count: usize,
    pub size_cap: usize,
    pub laws: LawConfig,
}

impl Default for ReproConfig {
    fn default() -> Self {
        ReproConfig {
            seed: 0,
            count: 200,
            size_cap: 12,
            laws: LawConfig::default(),
        }
    }
}

fn p(n: u64, d: u64) -> Probability {
    Probability::from_ratio(n, d).expect("valid probability")
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn peps(eps: &Probability) -> Strategy {
    Strategy::PEps(eps.clone())
}

fn short_grid() -> Vec<Probability> {
    vec![p(1, 10), p(1, 4), p(1, 2), p(3, 4), p(1, 1)]
}

fn item(id: u8, title: &str, passed: bool, lines: Vec<String>) -> Item {
    Item {
        id,
        title: title.into(),
        passed,
        lines,
    }
}

pub fn run(cfg: &ReproConfig) -> Vec<Item> {
    let corpus = Corpus::default_corpus(cfg.seed, cfg.size_cap, cfg.count, cfg.laws.fuel);
    vec![
        example1(),
        example2(),
        inverse_eps(),
        example2_chain(),
        foster(&corpus, cfg),
        mn_family(),
        subcalculus_minimum(&corpus, cfg),
        law_suite(&corpus, cfg),
        pars_semantics(&corpus, cfg),
        monte_carlo(),
    ]
}

fn example1() -> Item {
    let t = mk_example1();
    let lo = n_steps(&t, Deterministic::Lo, 1000);
    let ri = n_steps(&t, Deterministic::Ri, 1000);
    let passed = lo == StepCount::Finite(1) && ri == StepCount::FuelExhausted(1000);
    item(
        1,
        "(\\x.y) Omega: LO takes 1 step, RI diverges",
        passed,
        vec![format!("N_LO = {lo}"), format!("N_RI = {ri} (fuel 1000)")],
    )
}

fn render_trace(start: &Term, steps: &[Term]) -> String {
    std::iter::once(start)
        .chain(steps)
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join("  ->  ")
}

fn example2() -> Item {
    let t = mk_example2();
    let expect = |xs: &[&str]| -> Vec<Term> { xs.iter().map(|s| parse(s).expect("literal")).collect() };
    let lo_expected = expect(&[
        r"(\x.x) (\x.x) ((\x.x) (\x.x))",
        r"(\x.x) ((\x.x) (\x.x))",
        r"(\x.x) (\x.x)",
        r"\x.x",
    ]);
    let ri_expected = expect(&[r"(\x.x x) (\x.x)", r"(\x.x) (\x.x)", r"\x.x"]);
    let (lo, lo_n) = trace(&t, Deterministic::Lo, 10);
    let (ri, ri_n) = trace(&t, Deterministic::Ri, 10);
    let same = |a: &[Term], b: &[Term]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.alpha_eq(y));
    let passed = lo_n == StepCount::Finite(4)
        && ri_n == StepCount::Finite(3)
        && same(&lo, &lo_expected)
        && same(&ri, &ri_expected);
    item(
        2,
        "(\\x.x x) (I I): LO takes 4 steps, RI takes 3",
        passed,
        vec![
            format!("LO ({lo_n}): {}", render_trace(&t, &lo)),
            format!("RI ({ri_n}): {}", render_trace(&t, &ri)),
        ],
    )
}

fn value(t: &Term, eps: &Probability) -> Option<ExpectedLength> {
    analyze(t, &peps(eps), 100_000).ok().map(|a| a.expected_length)
}

fn inverse_eps() -> Item {
    let mut passed = true;
    let mut lines = vec!["eps      exact    1/eps".to_string()];
    for eps in short_grid() {
        let want = BigRational::one() / eps.value();
        let got = value(&mk_example1(), &eps);
        passed &= got == Some(ExpectedLength::Finite(want.clone()));
        lines.push(format!("{:<8} {:<8} {}", eps.to_string(), show(&got), fmt_ratio(&want)));
    }
    item(3, "(\\x.y) Omega under P_eps: expected length 1/eps", passed, lines)
}

fn show(v: &Option<ExpectedLength>) -> String {
    v.as_ref().map_or("cap".to_string(), |v| v.to_string())
}

fn example2_chain() -> Item {
    let t = mk_example2();
    let mut passed = true;
    let mut lines = vec!["eps      exact    3+eps".to_string()];
    let mut grid = short_grid();
    grid.insert(0, Probability::zero());
    for eps in grid {
        let want = q(3, 1) + eps.value();
        let got = value(&t, &eps);
        passed &= got == Some(ExpectedLength::Finite(want.clone()));
        lines.push(format!("{:<8} {:<8} {}", eps.to_string(), show(&got), fmt_ratio(&want)));
    }
    let lo = n_steps(&t, Deterministic::Lo, 100).finite();
    let ri = n_steps(&t, Deterministic::Ri, 100).finite();
    passed &= value(&t, &p(1, 1)) == lo.map(|n| ExpectedLength::Finite(q(n as i64, 1)));
    passed &= value(&t, &Probability::zero()) == ri.map(|n| ExpectedLength::Finite(q(n as i64, 1)));
    lines.push("endpoints: eps = 1 gives N_LO, eps = 0 gives N_RI".into());
    item(4, "(\\x.x x) (I I) under P_eps: expected length 3 + eps", passed, lines)
}

fn foster(corpus: &Corpus, cfg: &ReproConfig) -> Item {
    let r = laws::law_foster(corpus, &cfg.laws);
    item(
        5,
        "E <= N_LO / eps on every normalising corpus term",
        r.failed == 0 && r.inconclusive == 0,
        vec![r.to_string()],
    )
}

/// `(n − 3) ε³ + 4 ε² + 2 / ε`, closed form for `M_n`.
pub fn mn_closed_form(n: usize, eps: &Probability) -> Option<BigRational> {
    if eps.is_zero() {
        return None;
    }
    let e = eps.value();
    let n = BigRational::from_integer(BigInt::from(n) - 3);
    Some(n * e * e * e + q(4, 1) * e * e + q(2, 1) / e)
}

fn mn_family() -> Item {
    let grid = grid_with_zero(&laws::default_grid());
    let mut passed = true;
    let mut discrepancies = 0;
    let mut lines = vec!["n  eps      solver               decimal          closed form          match".to_string()];
    for n in 2..=5 {
        let t = mk_mn(n).expect("n ≥ 1");
        let lo = n_steps(&t, Deterministic::Lo, 1000);
        let ri = n_steps(&t, Deterministic::Ri, 1000);
        let n3 = q(n as i64 + 3, 1);
        let mut below = false;
        for eps in &grid {
            let got = value(&t, eps);
            let closed = mn_closed_form(n, eps);
            let solver = got.as_ref().and_then(|v| v.finite().cloned());
            let agree = solver == closed;
            if !agree {
                discrepancies += 1;
            }
            if eps.is_one() {
                passed &= solver.as_ref() == Some(&n3) && closed.as_ref() == Some(&n3);
                passed &= lo == StepCount::Finite(n + 3);
            }
            if !eps.is_zero() && !eps.is_one() {
                below |= solver.as_ref().is_some_and(|v| *v < n3) && ri.finite().is_none();
            }
            lines.push(format!(
                "{n}  {:<8} {:<20} {:<16} {:<20} {}",
                eps.to_string(),
                show(&got),
                solver.as_ref().map_or("inf".to_string(), |v| significant(v, 12)),
                closed.as_ref().map_or("inf".to_string(), fmt_ratio),
                if agree { "yes" } else { "DISCREPANCY" }
            ));
        }
        passed &= below;
        lines.push(format!("   N_LO = {lo}, N_RI = {ri}, some eps in (0,1) beats both: {below}"));
    }
    lines.push(format!("closed form vs solver: {discrepancies} discrepancies"));
    item(6, "M_n family: n+3 at eps = 1 and an interior minimum", passed, lines)
}

fn argmin_at(profile: &[ExpectedLength], k: usize) -> bool {
    let Some(best) = profile[k].finite() else {
        return false;
    };
    profile.iter().all(|v| v.finite().is_none_or(|x| best <= x))
}

fn subcalculus_minimum(corpus: &Corpus, cfg: &ReproConfig) -> Item {
    let grid = grid_with_zero(&cfg.laws.grid);
    let zero = grid.iter().position(|e| e.is_zero()).expect("grid has 0");
    let one = grid.iter().position(|e| e.is_one()).expect("grid has 1");
    let check = |prefix: &str, k: usize| -> (usize, usize, Vec<String>) {
        let entries: Vec<_> = corpus.entries.iter().filter(|e| e.label.starts_with(prefix)).collect();
        let results: Vec<Option<bool>> = entries
            .par_iter()
            .map(|e| {
                laws::eps_profile(&e.term, &grid, cfg.laws.state_cap)
                    .ok()
                    .map(|prof| argmin_at(&prof, k))
            })
            .collect();
        let ok = results.iter().filter(|r| **r == Some(true)).count();
        let bad: Vec<String> = entries
            .iter()
            .zip(&results)
            .filter(|(_, r)| **r != Some(true))
            .map(|(e, r)| format!("  {} `{}`: {}", e.label, e.term, if r.is_none() { "cap" } else { "not minimal" }))
            .collect();
        (ok, entries.len(), bad)
    };
    let (a_ok, a_n, a_bad) = check("lambdaA#", one);
    let (i_ok, i_n, i_bad) = check("lambdaI#", zero);
    let mut lines = vec![
        format!("lambdaA terms minimal at eps = 1: {a_ok}/{a_n}"),
        format!("lambdaI terms minimal at eps = 0: {i_ok}/{i_n}"),
    ];
    lines.extend(a_bad.into_iter().chain(i_bad).take(10));
    item(
        7,
        "grid minimum at eps = 1 on lambdaA, at eps = 0 on lambdaI",
        a_ok == a_n && i_ok == i_n && a_n > 0 && i_n > 0,
        lines,
    )
}

pub const SUITE: [&str; 5] = [
    "lo_monotone",
    "anf_equal_length",
    "subcalculus_stability",
    "lambdaA_lo_optimal",
    "lambdaI_anf_optimal",
];

fn law_suite(corpus: &Corpus, cfg: &ReproConfig) -> Item {
    let reports: Vec<LawReport> = SUITE
        .iter()
        .map(|id| laws::run_law(id, corpus, &cfg.laws).expect("known law"))
        .collect();
    let run: usize = reports.iter().map(|r| r.run).sum();
    let inconclusive: usize = reports.iter().map(|r| r.inconclusive).sum();
    let fraction = if run == 0 { 0.0 } else { inconclusive as f64 / run as f64 };
    let passed = reports.iter().all(|r| r.ok()) && fraction < 0.05;
    let mut lines: Vec<String> = reports.iter().map(|r| r.to_string()).collect();
    lines.push(format!("inconclusive: {inconclusive}/{run}"));
    item(8, "law suite on the default corpus", passed, lines)
}

#[derive(Default)]
struct ParsTally {
    cases: usize,
    compared: usize,
    failures: Vec<String>,
}

fn pars_case(t: &Term, eps: &Probability, state_cap: usize, horizon: usize) -> (bool, Option<String>) {
    let tr = evolve_trace(t, &peps(eps), horizon);
    if tr.masses.windows(2).any(|w| w[1] > w[0]) {
        return (false, Some(format!("`{t}` eps {eps}: mass increases")));
    }
    let der: BigRational = derivation_length_dist(&tr).iter().sum();
    if der + tr.trailing_mass() != BigRational::one() {
        return (false, Some(format!("`{t}` eps {eps}: Der does not sum to 1")));
    }
    let Ok(a) = analyze(t, &peps(eps), state_cap) else {
        return (false, None);
    };
    let Some(exact) = a.expected_length.finite() else {
        return (false, None);
    };
    let gap = exact - expected_length_truncated(&tr).value;
    if gap < BigRational::zero() || gap >= q(1, 1_000_000) {
        return (true, Some(format!("`{t}` eps {eps}: truncated sum off by {}", significant(&gap, 6))));
    }
    (true, None)
}

fn pars_semantics(corpus: &Corpus, cfg: &ReproConfig) -> Item {
    let grid = grid_with_zero(&cfg.laws.grid);
    let jobs: Vec<(&Term, &Probability)> = corpus
        .entries
        .iter()
        .flat_map(|e| grid.iter().map(move |eps| (&e.term, eps)))
        .collect();
    let results: Vec<(bool, Option<String>)> = jobs
        .par_iter()
        .map(|(t, eps)| pars_case(t, eps, cfg.laws.state_cap, 2000))
        .collect();
    let mut tally = ParsTally::default();
    for (compared, failure) in results {
        tally.cases += 1;
        tally.compared += usize::from(compared);
        tally.failures.extend(failure);
    }
    let mut lines = vec![
        format!("cases (term, eps): {}", tally.cases),
        format!("compared with the exact solver at horizon 2000: {}", tally.compared),
        format!("failures: {}", tally.failures.len()),
    ];
    lines.extend(tally.failures.iter().take(10).cloned());
    item(
        9,
        "traces: monotone mass, Der sums to 1, partial sums meet the solver",
        tally.failures.is_empty(),
        lines,
    )
}

fn monte_carlo() -> Item {
    let half = p(1, 2);
    let cases = [("example1", mk_example1(), 2.0), ("example2", mk_example2(), 3.5)];
    let mut passed = true;
    let mut lines = Vec::new();
    for (name, t, exact) in cases {
        let within = (0..100u64)
            .filter(|k| {
                let e = estimate(&t, &peps(&half), k * 10_000, 10_000, 10_000);
                e.cutoff_count == 0 && (e.mean - exact).abs() <= 3.0 * e.confidence_halfwidth_95
            })
            .count();
        passed &= within >= 99;
        lines.push(format!("{name}: {within}/100 base seeds within 3 half-widths of {exact}"));
    }
    item(10, "Monte Carlo agrees with the exact values", passed, lines)
}

pub fn render_text(items: &[Item]) -> String {
    let mut out = String::new();
    for it in items {
        let tag = if it.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("[{tag}] {:>2}  {}\n", it.id, it.title));
        for l in it.lines.iter().flat_map(|l| l.lines()) {
            out.push_str(&format!("      {l}\n"));
        }
    }
    let passed = items.iter().filter(|i| i.passed).count();
    out.push_str(&format!("{passed}/{} items pass\n", items.len()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_at_one_is_n_plus_three() {
        for n in 1..10 {
            assert_eq!(mn_closed_form(n, &p(1, 1)), Some(q(n as i64 + 3, 1)));
        }
        assert_eq!(mn_closed_form(2, &Probability::zero()), None);
        // (−1)/8 + 1 + 4
        assert_eq!(mn_closed_form(2, &p(1, 2)), Some(q(39, 8)));
    }

    #[test]
    fn cheap_items_pass() {
        for it in [example1(), example2(), inverse_eps(), example2_chain(), mn_family()] {
            assert!(it.passed, "{}", render_text(&[it.clone()]));
        }
    }

    #[test]
    fn argmin_handles_infinity() {
        let f = |n| ExpectedLength::Finite(q(n, 1));
        assert!(argmin_at(&[ExpectedLength::Infinite, f(3), f(3)], 1));
        assert!(!argmin_at(&[ExpectedLength::Infinite, f(3), f(2)], 1));
        assert!(!argmin_at(&[ExpectedLength::Infinite, f(3)], 0));
    }
}
