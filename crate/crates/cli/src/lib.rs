//! The `peps` command line: reduction traces, exact chain analysis, ε-sweeps,
//! Monte Carlo estimates, the law suite and the reproduction report.
//!
//! Exit codes: 0 success, 1 counterexample or violation, 2 inconclusive
//! (fuel or state cap), 3 usage error.

pub mod decimal;
pub mod repro;
pub mod sweep;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use peps_core::chain::{analyze, DEFAULT_STATE_CAP};
use peps_core::corpus::named_term;
use peps_core::laws::{self, Corpus, LawConfig, LAW_IDS};
use peps_core::montecarlo::{estimate, sample_path};
use peps_core::strategy::{trace, Deterministic, StepCount, DEFAULT_FUEL};
use peps_core::{parse, ChainError, Probability, Strategy, Term};
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "peps", version, about = "Probabilistic reduction strategies for the lambda calculus")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format; `sweep` defaults to csv, everything else to text.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the output to a file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CorpusKind {
    Default,
    Named,
    Random,
    Empty,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the reduction sequence of a term.
    Reduce {
        /// A term literal or a corpus name (I, omega, Omega, example1, example2, Cn:<n>, Mn:<n>).
        term: String,
        /// lo, ri or peps:<num>/<den>
        #[arg(long, default_value = "lo")]
        strategy: Strategy,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
        /// Seed of the sampled run for peps strategies.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build and solve the Markov chain of a term under P_eps.
    Analyze {
        term: String,
        #[arg(long)]
        eps: Probability,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        state_cap: usize,
    },
    /// Exact expected lengths over a grid of eps values.
    Sweep {
        #[arg(required = true)]
        terms: Vec<String>,
        /// Comma-separated num/den values; defaults to 0,1/10,1/4,1/2,3/4,9/10,1.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<Probability>,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        state_cap: usize,
    },
    /// Estimate the expected length by sampling.
    Montecarlo {
        term: String,
        #[arg(long)]
        eps: Probability,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
    },
    /// Run the law suite.
    Laws {
        /// `all` or a law id.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Base seed of the random corpus.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        size_cap: usize,
        /// Random terms per sub-calculus.
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, value_enum, default_value = "default")]
        corpus: CorpusKind,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
        #[arg(long, default_value_t = 20_000)]
        state_cap: usize,
        #[arg(long, value_delimiter = ',')]
        grid: Vec<Probability>,
    },
    /// Recompute every reference number and report pass/fail per item.
    Repro {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A command's result before it is written out.
struct Output {
    body: String,
    code: i32,
}

struct UsageError(String);

impl From<String> for UsageError {
    fn from(s: String) -> Self {
        UsageError(s)
    }
}

/// Resolves a corpus name, falling back to parsing a term literal.
pub fn resolve_term(arg: &str) -> Result<Term, String> {
    match named_term(arg) {
        Ok(Some(t)) => Ok(t),
        Ok(None) => parse(arg).map_err(|e| format!("cannot parse term `{arg}`: {e}")),
        Err(e) => Err(format!("bad corpus name `{arg}`: {e}")),
    }
}

/// Runs the command line `args` (program name first).
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let output = match dispatch(&cli) {
        Ok(o) => o,
        Err(UsageError(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, output.body.as_bytes()).map_err(|e| e.to_string()),
        None => stdout.write_all(output.body.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    output.code
}

fn dispatch(cli: &Cli) -> Result<Output, UsageError> {
    let format = cli.format;
    let only = |allowed: &[Format], default: Format| -> Result<Format, UsageError> {
        let f = format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(UsageError(format!("format {f:?} is not available for this command").to_lowercase()))
        }
    };
    match &cli.command {
        Command::Reduce {
            term,
            strategy,
            fuel,
            seed,
        } => {
            let f = only(&[Format::Text, Format::Json], Format::Text)?;
            cmd_reduce(&resolve_term(term)?, strategy, *fuel, *seed, f)
        }
        Command::Analyze { term, eps, state_cap } => {
            let f = only(&[Format::Text, Format::Json], Format::Text)?;
            cmd_analyze(&resolve_term(term)?, eps, *state_cap, f)
        }
        Command::Sweep {
            terms,
            grid,
            fuel,
            state_cap,
        } => {
            let f = only(&[Format::Text, Format::Csv, Format::Json], Format::Csv)?;
            let resolved = terms
                .iter()
                .map(|s| resolve_term(s).map(|t| (s.clone(), t)))
                .collect::<Result<Vec<_>, _>>()?;
            let grid = if grid.is_empty() {
                laws::grid_with_zero(&laws::default_grid())
            } else {
                grid.clone()
            };
            cmd_sweep(&resolved, &grid, *fuel, *state_cap, f)
        }
        Command::Montecarlo {
            term,
            eps,
            seed,
            samples,
            max_steps,
        } => {
            let f = only(&[Format::Text, Format::Json, Format::Csv], Format::Text)?;
            if *samples == 0 || *max_steps == 0 {
                return Err(UsageError("--samples and --max-steps must be at least 1".into()));
            }
            cmd_montecarlo(&resolve_term(term)?, eps, *seed, *samples, *max_steps, f)
        }
        Command::Laws {
            suite,
            seed,
            size_cap,
            count,
            corpus,
            fuel,
            state_cap,
            grid,
        } => {
            let f = only(&[Format::Text, Format::Json], Format::Text)?;
            if *size_cap == 0 {
                return Err(UsageError("--size-cap must be at least 1".into()));
            }
            let ids: Vec<&str> = if suite == "all" {
                LAW_IDS.to_vec()
            } else {
                let id = suite.strip_prefix("law_").unwrap_or(suite);
                if !LAW_IDS.contains(&id) {
                    return Err(UsageError(format!("unknown law `{suite}`; known: all, {}", LAW_IDS.join(", "))));
                }
                vec![id]
            };
            let mut cfg = LawConfig {
                fuel: *fuel,
                state_cap: *state_cap,
                ..LawConfig::default()
            };
            if !grid.is_empty() {
                cfg.grid = grid.clone();
            }
            let corpus = match corpus {
                CorpusKind::Default => Corpus::default_corpus(*seed, *size_cap, *count, *fuel),
                CorpusKind::Named => Corpus::named(),
                CorpusKind::Random => Corpus::random(*seed, *size_cap, *count, *fuel),
                CorpusKind::Empty => Corpus::empty(),
            };
            Ok(cmd_laws(&ids, &corpus, &cfg, f))
        }
        Command::Repro { seed } => {
            let f = only(&[Format::Text, Format::Json], Format::Text)?;
            let cfg = repro::ReproConfig {
                seed: *seed,
                ..repro::ReproConfig::default()
            };
            let items = repro::run(&cfg);
            let code = if items.iter().all(|i| i.passed) { EXIT_OK } else { EXIT_VIOLATION };
            let body = match f {
                Format::Json => to_json(&items),
                _ => repro::render_text(&items),
            };
            Ok(Output { body, code })
        }
    }
}

fn to_json<T: serde::Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

fn cmd_reduce(t: &Term, strategy: &Strategy, fuel: usize, seed: u64, f: Format) -> Result<Output, UsageError> {
    let (steps, count) = match strategy {
        Strategy::Lo => trace(t, Deterministic::Lo, fuel),
        Strategy::Ri => trace(t, Deterministic::Ri, fuel),
        Strategy::PEps(_) => {
            let (path, run) = sample_path(t, strategy, seed, fuel);
            (path, run.steps)
        }
    };
    let code = match count {
        StepCount::Finite(_) => EXIT_OK,
        StepCount::FuelExhausted(_) => EXIT_INCONCLUSIVE,
    };
    let body = match f {
        Format::Json => to_json(&json!({
            "term": t.to_string(),
            "strategy": strategy.to_string(),
            "seed": matches!(strategy, Strategy::PEps(_)).then_some(seed),
            "steps": steps.iter().map(|u| u.to_string()).collect::<Vec<_>>(),
            "length": count.to_string(),
        })),
        _ => {
            let mut s = String::new();
            if steps.is_empty() && count == StepCount::Finite(0) {
                s.push_str("normal form\n");
            }
            for (i, u) in steps.iter().enumerate() {
                s.push_str(&format!("{}: {u}\n", i + 1));
            }
            if let StepCount::FuelExhausted(n) = count {
                s.push_str(&format!("no normal form within {n} steps\n"));
            }
            s
        }
    };
    Ok(Output { body, code })
}

fn cmd_analyze(t: &Term, eps: &Probability, state_cap: usize, f: Format) -> Result<Output, UsageError> {
    match analyze(t, &Strategy::PEps(eps.clone()), state_cap) {
        Ok(a) => {
            let report = a.report();
            let body = match f {
                Format::Json => to_json(&report),
                _ => format!("{report}\n"),
            };
            Ok(Output { body, code: EXIT_OK })
        }
        Err(ChainError::StateCapExceeded { cap, frontier }) => {
            let msg = format!("more than {cap} reachable states ({frontier} unexplored)");
            let body = match f {
                Format::Json => to_json(&json!({ "error": "state_cap", "message": msg })),
                _ => format!("inconclusive: {msg}\n"),
            };
            Ok(Output {
                body,
                code: EXIT_INCONCLUSIVE,
            })
        }
        Err(e) => Ok(Output {
            body: format!("error: {e}\n"),
            code: EXIT_VIOLATION,
        }),
    }
}

fn cmd_sweep(
    terms: &[(String, Term)],
    grid: &[Probability],
    fuel: usize,
    state_cap: usize,
    f: Format,
) -> Result<Output, UsageError> {
    let rows = sweep::sweep(terms, grid, fuel, state_cap);
    let code = if rows.iter().any(|r| r.is_capped()) {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    };
    let body = match f {
        Format::Json => to_json(&rows),
        Format::Text => sweep::write_text(&rows),
        Format::Csv => {
            let mut buf = Vec::new();
            sweep::write_csv(&rows, &mut buf).map_err(|e| UsageError(e.to_string()))?;
            String::from_utf8(buf).expect("csv output is utf-8")
        }
    };
    Ok(Output { body, code })
}

fn cmd_montecarlo(
    t: &Term,
    eps: &Probability,
    seed: u64,
    samples: usize,
    max_steps: usize,
    f: Format,
) -> Result<Output, UsageError> {
    let strategy = Strategy::PEps(eps.clone());
    let e = estimate(t, &strategy, seed, samples, max_steps);
    let code = if e.cutoff_count > 0 {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    };
    let body = match f {
        Format::Json => to_json(&json!({
            "term": t.to_string(),
            "strategy": strategy.to_string(),
            "base_seed": seed,
            "max_steps": max_steps,
            "estimate": e,
        })),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.serialize(&e).map_err(|err| UsageError(err.to_string()))?;
            String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv output is utf-8")
        }
        Format::Text => format!(
            "term: {t}\nstrategy: {strategy}\nseeds: {seed}..{}\nsamples: {}\ncutoffs: {}\nmean: {}\nsample_variance: {}\nconfidence_halfwidth_95: {}\n",
            seed.wrapping_add(samples as u64 - 1),
            e.sample_count,
            e.cutoff_count,
            e.mean,
            e.sample_variance,
            e.confidence_halfwidth_95
        ),
    };
    Ok(Output { body, code })
}

fn cmd_laws(ids: &[&str], corpus: &Corpus, cfg: &LawConfig, f: Format) -> Output {
    let reports: Vec<_> = ids
        .iter()
        .map(|id| laws::run_law(id, corpus, cfg).expect("validated law id"))
        .collect();
    let code = if reports.iter().any(|r| !r.ok()) {
        EXIT_VIOLATION
    } else if reports.iter().any(|r| r.inconclusive > 0) {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    };
    let body = match f {
        Format::Json => to_json(&reports),
        _ => {
            let mut s = format!("corpus: {} ({} terms)\n", corpus.description, corpus.len());
            for r in &reports {
                s.push_str(&format!("{r}\n"));
            }
            s
        }
    };
    Output { body, code }
}
