//! Valid lower bounds from dual matrices, plus exact and heuristic tree oracles.

mod enumerate;
mod heuristic;
mod safe;

pub use enumerate::{
    brute_force_qmstp, brute_force_with_incumbent, count_spanning_trees, for_each_spanning_tree,
    MAX_ENUMERATION_N,
};
pub use heuristic::heuristic_upper_bound;
pub use safe::{lagrangian_bound, lp_min_over_yc, min_over_y, valid_lower_bound, SafeBound};
