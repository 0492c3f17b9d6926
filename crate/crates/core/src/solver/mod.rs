//! Van Vleck / Stieltjes pairs for Fuchs index `r <= 2`.

mod eliminate;
mod homotopy;
mod multipoly;
mod resultant;
mod solve;

pub use eliminate::{
    back_substitute, back_substitute_symbolic, eliminate, eliminate_scaled, reduced_residuals,
    ReducedSystem, DEFAULT_RESONANCE_TOL, DEFAULT_TERM_BOUND,
};
pub use multipoly::MultiPoly;
pub use resultant::resultant_first_variable;
pub use solve::{
    natural_multiplicity, relative_residual, solve, solve_r0, solve_r1, solve_r2, sweep_levels,
    sweep_total, validate_pair, SolveOptions, SolveReport, SpectralPair, Sweep,
};
