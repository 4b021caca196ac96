//! Exact expected lengths over an ε-grid, one row per (term, ε).

use num_rational::BigRational;
use peps_core::chain::analyze;
use peps_core::strategy::{fmt_ratio, n_steps, Deterministic, StepCount};
use peps_core::{ChainError, Probability, Strategy, Term};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decimal::significant;

pub const HEADER: [&str; 8] = [
    "term_id",
    "epsilon",
    "expected_length",
    "expected_length_decimal",
    "termination_prob",
    "n_lo",
    "n_ri",
    "foster_bound",
];

/// All fields are kept as rendered text so that CSV round-trips exactly.
/// `cap` marks a chain that exceeded the state cap, `div` a deterministic
/// strategy that ran out of fuel, `inf` an infinite value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub term_id: String,
    pub epsilon: String,
    pub expected_length: String,
    pub expected_length_decimal: String,
    pub termination_prob: String,
    pub n_lo: String,
    pub n_ri: String,
    pub foster_bound: String,
}

impl SweepRow {
    pub fn is_capped(&self) -> bool {
        self.expected_length == "cap"
    }
}

fn count(c: StepCount) -> String {
    c.to_string()
}

pub fn sweep_row(id: &str, t: &Term, eps: &Probability, fuel: usize, state_cap: usize) -> SweepRow {
    let lo = n_steps(t, Deterministic::Lo, fuel);
    let ri = n_steps(t, Deterministic::Ri, fuel);
    let foster_bound = match (lo.finite(), eps.is_zero()) {
        (_, true) => "n/a".to_string(),
        (None, false) => "inf".to_string(),
        (Some(n), false) => fmt_ratio(&(BigRational::from_integer(n.into()) / eps.value())),
    };
    let (expected_length, expected_length_decimal, termination_prob) =
        match analyze(t, &Strategy::PEps(eps.clone()), state_cap) {
            Ok(a) => {
                let decimal = match a.expected_length.finite() {
                    Some(v) => significant(v, 12),
                    None => "inf".to_string(),
                };
                (a.expected_length.to_string(), decimal, fmt_ratio(&a.termination_prob))
            }
            Err(ChainError::StateCapExceeded { .. }) => ("cap".into(), "cap".into(), "cap".into()),
            Err(e) => (format!("error: {e}"), "error".into(), "error".into()),
        };
    SweepRow {
        term_id: id.to_string(),
        epsilon: eps.to_string(),
        expected_length,
        expected_length_decimal,
        termination_prob,
        n_lo: count(lo),
        n_ri: count(ri),
        foster_bound,
    }
}

/// Rows ordered by ε ascending, then term id.
pub fn sweep(terms: &[(String, Term)], grid: &[Probability], fuel: usize, state_cap: usize) -> Vec<SweepRow> {
    let mut grid = grid.to_vec();
    grid.sort_by(|a, b| a.value().cmp(b.value()));
    grid.dedup();
    let mut order: Vec<usize> = (0..terms.len()).collect();
    order.sort_by(|&a, &b| terms[a].0.cmp(&terms[b].0));
    let jobs: Vec<(&Probability, usize)> = grid.iter().flat_map(|e| order.iter().map(move |&i| (e, i))).collect();
    jobs.par_iter()
        .map(|&(eps, i)| sweep_row(&terms[i].0, &terms[i].1, eps, fuel, state_cap))
        .collect()
}

pub fn write_csv<W: std::io::Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(HEADER)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> csv::Result<Vec<SweepRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

pub fn write_text(rows: &[SweepRow]) -> String {
    let mut table: Vec<[String; 8]> = vec![HEADER.map(String::from)];
    for r in rows {
        table.push([
            r.term_id.clone(),
            r.epsilon.clone(),
            r.expected_length.clone(),
            r.expected_length_decimal.clone(),
            r.termination_prob.clone(),
            r.n_lo.clone(),
            r.n_ri.clone(),
            r.foster_bound.clone(),
        ]);
    }
    let widths: Vec<usize> = (0..8).map(|c| table.iter().map(|row| row[c].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in &table {
        let cells: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}
