//! Peaceman-Rachford splitting on the facially reduced DNN relaxation, wrapped
//! in a cutting-plane loop over RLT cuts.

mod params;
mod solver;

pub use params::PrsmParams;
pub use solver::{
    compute_w, default_tau, initial_ytil, prsm_inner_step, residuals, separate_cuts, solve_bound,
    BoundResult, OuterRound, PrsmSetup, PrsmState, Residuals, TerminationReason,
};
