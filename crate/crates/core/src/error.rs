use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("a braid needs at least 2 strands, got {0}")]
    TooFewStrands(usize),
    #[error("not a Fibonacci string: {0}")]
    NotFibonacci(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("size cap exceeded: {n} qubits > {cap}")]
    SizeCap { n: usize, cap: usize },
    #[error("move not applicable: {0}")]
    MoveNotApplicable(String),
    #[error("plat closure needs an even strand count, got {0}")]
    OddStrands(usize),
    #[error("malformed circuit: {0}")]
    Circuit(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("every shot was discarded")]
    AllDiscarded,
    #[error("did not converge: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
