//! Lower bounds for the quadratic minimum spanning tree problem.
//!
//! The bound comes from a doubly nonnegative relaxation, facially reduced by a
//! basis `W` of the complement of `T = (1_m; −(n−1))` and solved with a
//! Peaceman-Rachford splitting. RLT cuts `Σ_{e∈δ(i)} y_fe ≥ y_f` are added in
//! rounds. Every reported bound is recomputed from the dual iterate as a
//! certificate, so it stays valid however early the iteration stops.

pub mod bounds;
pub mod error;
pub mod graph;
pub mod instances;
pub mod linalg;
pub mod proj;
pub mod prsm;
pub mod validation;

pub use error::{QmstError, Result};
pub use graph::Graph;
pub use instances::{CostMatrix, Family, Instance, InstanceSpec};
pub use prsm::{solve_bound, BoundResult, PrsmParams};
