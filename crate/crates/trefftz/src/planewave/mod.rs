//! Plane-wave directions, the exact edge integration kernel and the two
//! edge-basis reduction algorithms.

mod directions;
mod filter;
mod kernel;
mod orthonormal;

pub use directions::{edge_direction_count, hp_direction_order, DirectionSet};
pub use filter::{filter_directions, FilteredTrace, TANGENT_TOL};
pub use kernel::{edge_mass_matrix, edge_pw_integral, phi};
pub use orthonormal::{orthonormalize_edge_basis, OrthoOptions, OrthonormalEdgeBasis};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlaneWaveError {
    #[error("edge mass matrix has no eigenvalue above the tolerance {sigma:e} (largest {largest:e})")]
    DegenerateEdge { sigma: f64, largest: f64 },
    #[error("eigendecomposition of the edge mass matrix failed")]
    Eigen,
}
