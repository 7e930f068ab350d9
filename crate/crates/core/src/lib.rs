//! Jones polynomial evaluation at the fifth root of unity through a
//! simulated Fibonacci-anyon circuit protocol, with exact and tensor-network
//! classical baselines, benchmark generation and resource estimates.

pub mod baselines;
pub mod benchgen;
pub mod braid;
pub mod compiled;
pub mod error;
pub mod fib;
pub mod protocol;
pub mod qsim;
pub mod rep;
pub mod resources;
pub mod simplify;

pub use braid::{BraidWord, ClosureKind, MarkovMove, SlideDirection};
pub use error::{Error, Result};
pub use fib::{FibString, PHI};
pub use simplify::simplify;
