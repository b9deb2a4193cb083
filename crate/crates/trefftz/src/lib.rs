//! Nonconforming Trefftz virtual element method for the Helmholtz equation
//! with plane-wave projections and an orthonormalized edge basis.
//!
//! Everything is generic over the real scalar (`f32` or `f64`); the aliases
//! below fix `f64`.

pub mod analysis;
pub mod assembly;
pub mod geometry;
pub mod mesh;
pub mod planewave;
pub mod problems;
pub mod quadrature;
pub mod scalar;
pub mod special;

pub use scalar::{Real, C};

pub type Point = geometry::Point<f64>;
pub type Complex = C<f64>;
pub type Mesh = mesh::PolygonalMesh<f64>;
pub type ProblemSpec = assembly::ProblemSpec<f64>;
pub type DirectionLayout = assembly::DirectionLayout<f64>;
pub type BasisKind = assembly::BasisKind<f64>;
pub type GlobalSystem<'m> = assembly::GlobalSystem<'m, f64>;
pub type AnalyticSolution = problems::AnalyticSolution<f64>;
