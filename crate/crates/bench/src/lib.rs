//! Benchmark fixtures shared by the criterion targets in `benches/`.

use peps_core::corpus::{mk_cn, mk_example2, mk_mn};
use peps_core::{Probability, Term};

/// Terms whose chains grow with `n`.
pub fn mn_family() -> Vec<(usize, Term)> {
    (2..=5).map(|n| (n, mk_mn(n).unwrap())).collect()
}

/// A long text to parse: `C_n` applied to example 2.
pub fn parse_input(n: usize) -> String {
    Term::app(mk_cn(n).unwrap(), mk_example2()).to_string()
}

pub fn half() -> Probability {
    Probability::from_ratio(1, 2).unwrap()
}
