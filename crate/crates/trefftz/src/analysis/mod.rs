//! Projected error norms, rate tables and matrix probes.

mod errors;
mod probes;
mod table;

pub use errors::{
    integrate_polygon, projected_errors, projected_errors_against, ComponentTol, Field, PiecewisePlaneWaves, ProjectedErrors,
    QuadratureOptions,
};
pub use probes::{
    condition_probe, edge_mass_condition, neumann_eig_probe, neumann_eigenvalue_k, ConditionRow, EigenRow,
};
pub use table::{fitted_rate, linear_fit, original_ndof_cartesian, rate, ErrorRow, ErrorTable, RowStatus, CSV_HEADER};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("field evaluation failed at ({x}, {y}): {msg}")]
    Evaluation { x: f64, y: f64, msg: String },
    #[error("no element of the reference mesh contains ({x}, {y})")]
    Locate { x: f64, y: f64 },
    #[error("eigenvalue computation failed: {0}")]
    Eigen(String),
}
