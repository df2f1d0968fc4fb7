//! Projection operators used by the splitting method.

mod cuts;
mod dykstra;
mod lifted;
mod rlt;
mod simplex;
mod spectral;

pub use cuts::{cluster_cuts, Cluster, Cut, CutClusters};
pub use dykstra::{dykstra_project, dykstra_project_capped, DykstraOutcome, DEFAULT_MAX_CYCLES};
pub use lifted::{project_y, LiftedMatrix};
pub use rlt::project_tkf;
pub use simplex::{project_capped_simplex, project_simplex};
pub use spectral::project_r;
