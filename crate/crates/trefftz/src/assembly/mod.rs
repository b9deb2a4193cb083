//! Local VE matrices, edge bases, global assembly and the sparse solve.

mod boundary;
mod edges;
mod local;
mod system;

pub use boundary::{edge_data_integrals, edge_load_vector, dirichlet_values, robin_matrix};
pub use edges::{DirectionLayout, Discretization, EdgeBasis, EdgeData};
pub use local::{consistency_matrix, local_b, local_b_full, local_d, local_d_full, local_g, local_stiffness, near_singular, projector_matrices,
    stabilization, LocalElementMatrices, NearSingular};
pub use system::{assemble_and_solve, GlobalSystem, SolveReport};

use std::sync::Arc;

use thiserror::Error;

use crate::geometry::Point;
use crate::mesh::BoundaryLabel;
use crate::planewave::{OrthoOptions, PlaneWaveError};
use crate::scalar::{Real, C};

/// Boundary datum g(x, n) with n the outward unit normal.
pub type BoundaryFn<T> = Arc<dyn Fn(Point<T>, Point<T>) -> C<T> + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BasisKind<T> {
    /// Trace filtering with the optional constant (original method).
    Filtered,
    /// Eigenvalue-based orthonormal edge basis (modified method).
    Orthonormal(OrthoOptions<T>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stabilization {
    Identity,
    ModifiedDRecipe,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
    Robin,
}

#[derive(Clone)]
pub struct ProblemSpec<T> {
    pub k: T,
    /// Sign of the impedance term, ±1.
    pub theta: T,
    pub g_d: BoundaryFn<T>,
    pub g_n: BoundaryFn<T>,
    pub g_r: BoundaryFn<T>,
    /// Condition imposed on edges labelled `Scatterer`.
    pub scatterer: BoundaryCondition,
    /// Points where the boundary data are singular; boundary quadrature
    /// is graded toward them.
    pub singular_points: Vec<Point<T>>,
}

impl<T: Real> ProblemSpec<T> {
    pub fn condition(&self, label: BoundaryLabel) -> BoundaryCondition {
        match label {
            BoundaryLabel::Dirichlet => BoundaryCondition::Dirichlet,
            BoundaryLabel::Neumann => BoundaryCondition::Neumann,
            BoundaryLabel::Robin => BoundaryCondition::Robin,
            BoundaryLabel::Scatterer => self.scatterer,
        }
    }

    pub fn datum(&self, bc: BoundaryCondition) -> &BoundaryFn<T> {
        match bc {
            BoundaryCondition::Dirichlet => &self.g_d,
            BoundaryCondition::Neumann => &self.g_n,
            BoundaryCondition::Robin => &self.g_r,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssemblyOptions {
    pub stabilization: Stabilization,
    /// Fail instead of reporting when an element matrix Gᴷ is near singular.
    pub strict_singular: bool,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self { stabilization: Stabilization::ModifiedDRecipe, strict_singular: false }
    }
}

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error("edge {edge}: {source}")]
    EdgeBasis { edge: usize, source: PlaneWaveError },
    #[error("edge {edge}: edge mass matrix is singular (condition {cond:e})")]
    SingularEdgeMass { edge: usize, cond: f64 },
    #[error("{0}")]
    NearSingularElement(NearSingular),
    #[error("sparse factorization failed: {0}")]
    Factorization(String),
    #[error("layout has {layout} element degrees for {mesh} elements")]
    Layout { layout: usize, mesh: usize },
}
