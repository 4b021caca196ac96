//! Acceptance criteria, one pass/fail line each. Runs without the libtest
//! harness so the summary prints in order; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use peps_core::chain::{analyze, explore_states, Target};
use peps_core::corpus::{mk_example1, mk_example2, mk_mn};
use peps_core::laws::{self, grid_with_zero, Corpus, LawConfig};
use peps_core::montecarlo::estimate;
use peps_core::pars::{derivation_length_dist, evolve_trace, expected_length_truncated};
use peps_core::strategy::{n_steps, trace, Deterministic, StepCount};
use peps_core::{parse, ExpectedLength, Probability, Strategy, Term};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn p(n: u64, d: u64) -> Probability {
    Probability::from_ratio(n, d).unwrap()
}

fn t(s: &str) -> Term {
    parse(s).unwrap()
}

fn peps(e: &Probability) -> Strategy {
    Strategy::PEps(e.clone())
}

fn grid5() -> Vec<Probability> {
    vec![p(1, 10), p(1, 4), p(1, 2), p(3, 4), p(1, 1)]
}

fn exact(t: &Term, e: &Probability) -> ExpectedLength {
    analyze(t, &peps(e), 100_000).unwrap().expected_length
}

struct Outcome {
    passed: bool,
    notes: Vec<String>,
}

fn outcome(passed: bool, notes: Vec<String>) -> Outcome {
    Outcome { passed, notes }
}

fn within(budget: Duration, start: Instant, notes: &mut Vec<String>) -> bool {
    let took = start.elapsed();
    notes.push(format!("runtime {:.2}s (budget {}s)", took.as_secs_f64(), budget.as_secs()));
    took < budget
}

fn c1() -> Outcome {
    let lo = n_steps(&mk_example1(), Deterministic::Lo, 1000);
    let ri = n_steps(&mk_example1(), Deterministic::Ri, 1000);
    outcome(
        lo == StepCount::Finite(1) && ri == StepCount::FuelExhausted(1000),
        vec![format!("N_LO = {lo:?}, N_RI = {ri:?}")],
    )
}

fn c2() -> Outcome {
    let lo_ref = [
        r"(\x.x) (\x.x) ((\x.x) (\x.x))",
        r"(\x.x) ((\x.x) (\x.x))",
        r"(\x.x) (\x.x)",
        r"\x.x",
    ];
    let ri_ref = [r"(\x.x x) (\x.x)", r"(\x.x) (\x.x)", r"\x.x"];
    let (lo, lo_n) = trace(&mk_example2(), Deterministic::Lo, 100);
    let (ri, ri_n) = trace(&mk_example2(), Deterministic::Ri, 100);
    let matches =
        |got: &[Term], want: &[&str]| got.len() == want.len() && got.iter().zip(want).all(|(g, w)| g.alpha_eq(&t(w)));
    let mut notes = vec![];
    for (name, steps) in [("LO", &lo), ("RI", &ri)] {
        let shown: Vec<String> = steps.iter().map(|u| u.to_string()).collect();
        notes.push(format!("{name}: {}", shown.join("  ->  ")));
    }
    outcome(
        lo_n == StepCount::Finite(4) && ri_n == StepCount::Finite(3) && matches(&lo, &lo_ref) && matches(&ri, &ri_ref),
        notes,
    )
}

fn c3() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut notes = vec![];
    for e in grid5() {
        let want = BigRational::new(e.denom().clone(), e.numer().clone());
        let got = exact(&mk_example1(), &e);
        ok &= got == ExpectedLength::Finite(want.clone());
        notes.push(format!("eps {e}: {got:?} (want {want})"));
    }
    ok &= within(Duration::from_secs(1), start, &mut notes);
    outcome(ok, notes)
}

/// Plain Gauss-Jordan over ℚ.
fn gauss_jordan(mut m: Vec<Vec<BigRational>>) -> Vec<BigRational> {
    let n = m.len();
    for c in 0..n {
        let r = (c..n).find(|&r| !m[r][c].is_zero()).expect("nonsingular");
        m.swap(c, r);
        let inv = BigRational::one() / &m[c][c];
        for x in m[c].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for k in 0..=n {
                    let v = &m[c][k] * &f;
                    m[r][k] -= v;
                }
            }
        }
    }
    m.into_iter().map(|row| row[n].clone()).collect()
}

/// Hand-derived chain of (λx.x x)(I I):
/// A → B (ε) | C (1−ε);  B → D (ε) | E (1−ε);  C, D, E → F;  F → trm.
fn hand_chain(e: &BigRational) -> (Vec<Term>, Vec<Vec<BigRational>>) {
    let states = vec![
        t(r"(\x.x x) ((\x.x) (\x.x))"),
        t(r"(\x.x) (\x.x) ((\x.x) (\x.x))"),
        t(r"(\x.x x) (\x.x)"),
        t(r"(\x.x) ((\x.x) (\x.x))"),
        t(r"(\x.x) (\x.x) (\x.x)"),
        t(r"(\x.x) (\x.x)"),
    ];
    let one = BigRational::one();
    let z = BigRational::zero;
    let mut pm = vec![vec![z(); 6]; 6];
    pm[0][1] = e.clone();
    pm[0][2] = &one - e;
    pm[1][3] = e.clone();
    pm[1][4] = &one - e;
    pm[2][5] = one.clone();
    pm[3][5] = one.clone();
    pm[4][5] = one.clone();
    (states, pm)
}

fn c4() -> Outcome {
    let mut ok = true;
    let mut notes = vec![];
    let mut grid = grid5();
    grid.insert(0, Probability::zero());
    for e in &grid {
        let (states, pm) = hand_chain(e.value());
        // (I − Q) k = 1
        let system: Vec<Vec<BigRational>> = (0..6)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..6)
                    .map(|j| if i == j { BigRational::one() } else { BigRational::zero() } - &pm[i][j])
                    .collect();
                row.push(BigRational::one());
                row
            })
            .collect();
        let k = gauss_jordan(system);
        let formula = q(3, 1) + e.value();
        ok &= k[0] == formula;

        let got = exact(&mk_example2(), e);
        ok &= got == ExpectedLength::Finite(formula.clone());

        let g = explore_states(&mk_example2(), &peps(e), 100).unwrap();
        if !e.is_zero() && !e.is_one() {
            ok &= g.state_count() == 7;
            for (i, s) in states.iter().enumerate() {
                let Some(Target::State(gi)) = g.index_of(s) else {
                    ok = false;
                    continue;
                };
                for (j, s2) in states.iter().enumerate() {
                    if let Some(Target::State(gj)) = g.index_of(s2) {
                        ok &= g.probability(gi, Target::State(gj)) == pm[i][j];
                    }
                }
            }
        }

        let tr = expected_length_truncated(&evolve_trace(&mk_example2(), &peps(e), 50));
        let gap = &formula - &tr.value;
        ok &= gap >= BigRational::zero() && gap < q(1, 1_000_000_000_000);
        notes.push(format!("eps {e}: solver {got:?}, hand chain {}, 3+eps {formula}", k[0]));
    }
    ok &= exact(&mk_example2(), &p(1, 1)) == ExpectedLength::Finite(q(4, 1));
    ok &= exact(&mk_example2(), &Probability::zero()) == ExpectedLength::Finite(q(3, 1));
    outcome(ok, notes)
}

fn default_corpus() -> Corpus {
    Corpus::default_corpus(0, 12, 200, 1000)
}

fn c5(corpus: &Corpus) -> Outcome {
    let mut checked = 0;
    let mut violations = vec![];
    let mut capped = 0;
    for entry in &corpus.entries {
        let Some(n_lo) = n_steps(&entry.term, Deterministic::Lo, 1000).finite() else {
            continue;
        };
        for e in laws::default_grid() {
            let bound = BigRational::from_integer(BigInt::from(n_lo)) / e.value();
            match analyze(&entry.term, &peps(&e), 20_000) {
                Ok(a) => {
                    checked += 1;
                    if !a.expected_length.finite().is_some_and(|v| *v <= bound) {
                        violations.push(format!("{} eps {e}: {:?} > {bound}", entry.label, a.expected_length));
                    }
                }
                Err(_) => capped += 1,
            }
        }
    }
    let mut notes = vec![format!("(term, eps) pairs checked: {checked}, capped: {capped}")];
    notes.extend(violations.iter().take(5).cloned());
    outcome(violations.is_empty() && capped == 0 && checked > 0, notes)
}

fn c6() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut notes = vec!["n  eps    solver        closed form   agree".to_string()];
    let grid = grid_with_zero(&laws::default_grid());
    for n in 2..=5usize {
        let m = mk_mn(n).unwrap();
        let n3 = q(n as i64 + 3, 1);
        let lo = n_steps(&m, Deterministic::Lo, 1000);
        let ri = n_steps(&m, Deterministic::Ri, 1000);
        ok &= lo == StepCount::Finite(n + 3);
        let mut interior = false;
        for e in &grid {
            let got = exact(&m, e);
            let closed = (!e.is_zero()).then(|| {
                let x = e.value();
                q(n as i64 - 3, 1) * x * x * x + q(4, 1) * x * x + q(2, 1) / x
            });
            let agree = got.finite() == closed.as_ref();
            if e.is_one() {
                ok &= got == ExpectedLength::Finite(n3.clone()) && closed.as_ref() == Some(&n3);
            }
            if !e.is_zero() && !e.is_one() {
                interior |= got.finite().is_some_and(|v| *v < n3) && ri.finite().is_none();
            }
            notes.push(format!(
                "{n}  {:<6} {:<13} {:<13} {}",
                e.to_string(),
                format!("{got:?}"),
                closed.map_or("inf".into(), |c| c.to_string()),
                if agree { "yes" } else { "DISCREPANCY" }
            ));
        }
        ok &= interior;
    }
    ok &= within(Duration::from_secs(10), start, &mut notes);
    outcome(ok, notes)
}

fn minimal_at(profile: &[ExpectedLength], k: usize) -> bool {
    let Some(best) = profile[k].finite() else {
        return false;
    };
    profile.iter().all(|v| match v.finite() {
        Some(x) => best <= x,
        None => true,
    })
}

fn c7(corpus: &Corpus) -> Outcome {
    let grid = grid_with_zero(&laws::default_grid());
    let zero = grid.iter().position(|e| e.is_zero()).unwrap();
    let one = grid.iter().position(|e| e.is_one()).unwrap();
    let mut notes = vec![];
    let mut ok = true;
    for (prefix, k, check) in [
        ("lambdaA#", one, Term::is_lambda_a as fn(&Term) -> bool),
        ("lambdaI#", zero, Term::is_lambda_i),
    ] {
        let entries: Vec<_> = corpus.entries.iter().filter(|e| e.label.starts_with(prefix)).collect();
        let mut good = 0;
        for e in &entries {
            ok &= check(&e.term);
            if prefix == "lambdaI#" {
                ok &= n_steps(&e.term, Deterministic::Lo, 1000).finite().is_some();
            }
            let profile: Vec<ExpectedLength> = grid.iter().map(|g| exact(&e.term, g)).collect();
            if minimal_at(&profile, k) {
                good += 1;
            } else {
                notes.push(format!("  {} `{}` not minimal at {}", e.label, e.term, grid[k]));
            }
        }
        ok &= entries.len() == 200 && good == entries.len();
        notes.push(format!("{prefix} minimal at eps = {}: {good}/{}", grid[k], entries.len()));
    }
    outcome(ok, notes)
}

fn c8(corpus: &Corpus) -> Outcome {
    let start = Instant::now();
    let cfg = LawConfig::default();
    let ids = [
        "law_lo_monotone",
        "law_anf_equal_length",
        "law_subcalculus_stability",
        "law_lambdaA_lo_optimal",
        "law_lambdaI_anf_optimal",
    ];
    let mut ok = true;
    let mut notes = vec![];
    let (mut run, mut inconclusive) = (0, 0);
    for id in ids {
        let r = laws::run_law(id, corpus, &cfg).unwrap();
        ok &= r.failed == 0 && r.run > 0;
        run += r.run;
        inconclusive += r.inconclusive;
        notes.push(r.to_string());
    }
    let fraction = inconclusive as f64 / run as f64;
    notes.push(format!("inconclusive fraction {fraction:.4}"));
    ok &= fraction < 0.05;
    ok &= within(Duration::from_secs(60), start, &mut notes);
    outcome(ok, notes)
}

fn c9(corpus: &Corpus) -> Outcome {
    let grid = grid_with_zero(&laws::default_grid());
    let mut failures = vec![];
    let (mut cases, mut compared) = (0, 0);
    for entry in &corpus.entries {
        for e in &grid {
            cases += 1;
            let tr = evolve_trace(&entry.term, &peps(e), 2000);
            if tr.masses[0] != BigRational::one() || tr.masses.windows(2).any(|w| w[1] > w[0]) {
                failures.push(format!("{} eps {e}: masses not monotone", entry.label));
            }
            let total = derivation_length_dist(&tr)
                .into_iter()
                .fold(tr.trailing_mass(), |acc, d| acc + d);
            if total != BigRational::one() {
                failures.push(format!("{} eps {e}: Der + trailing = {total}", entry.label));
            }
            let Ok(a) = analyze(&entry.term, &peps(e), 20_000) else {
                continue;
            };
            if a.termination_prob != BigRational::one() {
                continue;
            }
            compared += 1;
            let solved = a.expected_length.finite().expect("terminating chains have finite length").clone();
            let gap = solved - expected_length_truncated(&tr).value;
            if gap < BigRational::zero() || gap >= q(1, 1_000_000) {
                failures.push(format!("{} eps {e}: truncated sum off by {gap}", entry.label));
            }
        }
    }
    let mut notes = vec![format!("cases {cases}, compared with solver {compared}")];
    notes.extend(failures.iter().take(5).cloned());
    outcome(failures.is_empty(), notes)
}

fn c10() -> Outcome {
    let start = Instant::now();
    let half = p(1, 2);
    let mut ok = true;
    let mut notes = vec![];
    for (name, term, value) in [("example1", mk_example1(), 2.0), ("example2", mk_example2(), 3.5)] {
        let hits = (0..100u64)
            .filter(|k| {
                let est = estimate(&term, &peps(&half), k * 10_000, 10_000, 10_000);
                est.cutoff_count == 0 && (est.mean - value).abs() <= 3.0 * est.confidence_halfwidth_95
            })
            .count();
        ok &= hits >= 99;
        notes.push(format!("{name}: {hits}/100 base seeds within 3 half-widths of {value}"));
    }
    ok &= within(Duration::from_secs(30), start, &mut notes);
    outcome(ok, notes)
}

fn main() -> ExitCode {
    let corpus = default_corpus();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("1 LO/RI step counts on (\\x.y) Omega", Box::new(c1)),
        ("2 LO/RI traces of (\\x.x x)(I I)", Box::new(c2)),
        ("3 expected length 1/eps on (\\x.y) Omega", Box::new(c3)),
        ("4 expected length 3+eps on (\\x.x x)(I I)", Box::new(c4)),
        ("5 E <= N_LO/eps on the default corpus", Box::new(|| c5(&corpus))),
        ("6 M_n family", Box::new(c6)),
        ("7 grid minimum at eps=1 (lambdaA) and eps=0 (lambdaI)", Box::new(|| c7(&corpus))),
        ("8 law suite", Box::new(|| c8(&corpus))),
        ("9 trace semantics against the solver", Box::new(|| c9(&corpus))),
        ("10 Monte Carlo consistency", Box::new(c10)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let o = run();
        println!("[{}] criterion {name}", if o.passed { "PASS" } else { "FAIL" });
        for line in o.notes.iter().flat_map(|n| n.lines()) {
            println!("       {line}");
        }
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
