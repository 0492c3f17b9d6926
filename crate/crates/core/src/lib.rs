//! Polynomial eigenproblems for higher Lamé operators: find every Van Vleck
//! polynomial `V` for which `d S + V S = 0` has a polynomial solution `S` of
//! a prescribed degree, and check the root-location statements that go with
//! them.

pub mod analysis;
pub mod error;
pub mod operator;
pub mod pencil;
pub mod poly;
pub mod solver;

pub use error::{Error, Result};
pub use operator::{build_classical, ClassicalSpec, LameOperator, Nonresonance};
pub use poly::{Complex, Polynomial, RootSet};
pub use solver::{solve, SolveOptions, SolveReport, SpectralPair};
