//! Randomised reduction strategies for the untyped λ-calculus.
//!
//! The crate provides named λ-terms with α-canonical state identity, the
//! deterministic strategies leftmost-outermost (LO) and rightmost-innermost
//! (RI), the randomised strategy `P_ε`, the evolution semantics of
//! probabilistic abstract reduction systems, an exact absorbing-chain solver
//! for expected derivation lengths, a seeded Monte Carlo sampler and an
//! executable suite of laws relating all of the above.

pub mod canonical;
pub mod chain;
pub mod corpus;
pub mod error;
pub mod laws;
pub mod linsolve;
pub mod montecarlo;
pub mod pars;
pub mod parse;
pub mod strategy;
pub mod term;

pub use canonical::CanonicalTerm;
pub use chain::{ChainAnalysis, ExpectedLength, StateGraph};
pub use error::{ChainError, ProbabilityError, SyntaxError, TermError};
pub use laws::{Corpus, LawConfig, LawReport};
pub use montecarlo::{Estimate, RunResult};
pub use parse::parse;
pub use strategy::{Distribution, Probability, StepCount, Strategy};
pub use term::{Name, RedexPath, Step, SubCalculusTag, Term};
