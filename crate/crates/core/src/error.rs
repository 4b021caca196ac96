use thiserror::Error;

use crate::term::RedexPath;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at position {position}: {message}")]
pub struct SyntaxError {
    /// Character offset into the input.
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("path `{0}` does not address a redex")]
    InvalidPath(RedexPath),
    #[error("corpus builder needs n >= 1, got {0}")]
    InvalidArity(usize),
    #[error("random terms need max_size >= 1")]
    InvalidSize,
    #[error("could not meet the sub-calculus filter within {0} attempts")]
    GenerationExhausted(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProbabilityError {
    #[error("probability must lie in [0, 1], got {0}")]
    OutOfRange(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("malformed probability {0:?}: expected `num/den`, `0` or `1`")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("more than {cap} reachable states ({frontier} still unexplored)")]
    StateCapExceeded { cap: usize, frontier: usize },
    #[error("singular hitting-time system")]
    SingularSystem,
    #[error("epsilon must be positive for the Foster bound")]
    InvalidEpsilon,
}
