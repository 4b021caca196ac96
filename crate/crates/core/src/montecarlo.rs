//! Seeded simulation of a strategy, one independent run per seed.
//!
//! Every run owns a `ChaCha8Rng` seeded with `seed_from_u64(seed)`. The
//! stream is only consumed when the LO-redex and the RI-redex differ, and
//! each such step draws `u` uniformly from `[0, den)` and takes the LO-redex
//! iff `u < num`, where `num/den` is the exact ε.

use num_bigint::{BigInt, Sign};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical::CanonicalTerm;
use crate::strategy::{Probability, StepCount, Strategy};
use crate::term::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    /// `FuelExhausted(max_steps)` marks a cutoff.
    pub steps: StepCount,
    /// The normal form reached, `None` on cutoff.
    pub final_term: Option<CanonicalTerm>,
    pub seed: u64,
}

impl RunResult {
    pub fn is_cutoff(&self) -> bool {
        self.final_term.is_none()
    }
}

pub fn sample_run(t: &Term, strategy: &Strategy, seed: u64, max_steps: usize) -> RunResult {
    walk(t, strategy, seed, max_steps, |_| {})
}

/// `sample_run` together with the sampled reducts, in order.
pub fn sample_path(t: &Term, strategy: &Strategy, seed: u64, max_steps: usize) -> (Vec<Term>, RunResult) {
    let mut path = Vec::new();
    let result = walk(t, strategy, seed, max_steps, |u| path.push(u.clone()));
    (path, result)
}

fn walk(t: &Term, strategy: &Strategy, seed: u64, max_steps: usize, mut visit: impl FnMut(&Term)) -> RunResult {
    let eps = strategy.lo_weight();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = t.clone();
    for n in 0..=max_steps {
        let Some(lo) = current.leftmost_redex() else {
            return RunResult {
                steps: StepCount::Finite(n),
                final_term: Some(current.canonicalize()),
                seed,
            };
        };
        if n == max_steps {
            break;
        }
        let ri = current.rightmost_redex().expect("a term with a leftmost redex has a rightmost one");
        let path = if lo == ri || draw_lo(&mut rng, &eps) { lo } else { ri };
        current = current.reduce_at(&path).expect("redex path is valid");
        visit(&current);
    }
    RunResult {
        steps: StepCount::FuelExhausted(max_steps),
        final_term: None,
        seed,
    }
}

/// Bernoulli(ε) with exact rational ε.
fn draw_lo(rng: &mut ChaCha8Rng, eps: &Probability) -> bool {
    if eps.is_zero() {
        return false;
    }
    if eps.is_one() {
        return true;
    }
    if let (Ok(num), Ok(den)) = (u64::try_from(eps.numer()), u64::try_from(eps.denom())) {
        return rng.random_range(0..den) < num;
    }
    uniform_below(rng, eps.denom()) < *eps.numer()
}

/// Rejection sampling of `[0, bound)` for bounds beyond 64 bits.
fn uniform_below(rng: &mut ChaCha8Rng, bound: &BigInt) -> BigInt {
    let bits = bound.bits();
    let bytes = bits.div_ceil(8) as usize;
    let spare = (bytes as u64 * 8 - bits) as u32;
    let mut buf = vec![0u8; bytes];
    loop {
        rng.fill_bytes(&mut buf);
        buf[0] &= 0xff >> spare;
        let u = BigInt::from_bytes_be(Sign::Plus, &buf);
        if u < *bound {
            return u;
        }
    }
}

/// Summary over `sample_count` runs. Mean and variance are taken over the
/// runs that reached a normal form; cutoffs are only counted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub sample_count: usize,
    pub cutoff_count: usize,
    /// NaN when every run was cut off.
    pub mean: f64,
    pub sample_variance: f64,
    pub confidence_halfwidth_95: f64,
}

impl Estimate {
    pub fn cutoff_fraction(&self) -> f64 {
        self.cutoff_count as f64 / self.sample_count as f64
    }
}

/// Runs seeds `base_seed .. base_seed + n` in parallel and summarises them
/// in seed order.
pub fn estimate(t: &Term, strategy: &Strategy, base_seed: u64, n: usize, max_steps: usize) -> Estimate {
    let runs: Vec<RunResult> = (0..n as u64)
        .into_par_iter()
        .map(|i| sample_run(t, strategy, base_seed.wrapping_add(i), max_steps))
        .collect();
    summarise(&runs)
}

pub fn summarise(runs: &[RunResult]) -> Estimate {
    let lengths: Vec<u128> = runs
        .iter()
        .filter_map(|r| r.steps.finite().map(|s| s as u128))
        .collect();
    let m = lengths.len() as u128;
    let sum: u128 = lengths.iter().sum();
    let sum_sq: u128 = lengths.iter().map(|x| x * x).sum();
    let mean = if m == 0 { f64::NAN } else { sum as f64 / m as f64 };
    // (m Σx² − (Σx)²) / (m (m − 1)) is computed exactly before the division
    let sample_variance = if m < 2 {
        0.0
    } else {
        (m * sum_sq - sum * sum) as f64 / (m * (m - 1)) as f64
    };
    let confidence_halfwidth_95 = if m == 0 {
        f64::NAN
    } else {
        1.96 * (sample_variance / m as f64).sqrt()
    };
    Estimate {
        sample_count: runs.len(),
        cutoff_count: runs.len() - lengths.len(),
        mean,
        sample_variance,
        confidence_halfwidth_95,
    }
}
