//! Experiment registry for the Trefftz VEM solver: TOML manifests, the
//! h/p/hp/scattering runners and the matrix probes, all writing CSV.

pub mod config;
pub mod experiments;
pub mod registry;

pub use config::{BasisChoice, BoundaryChoice, ExperimentConfig, ExperimentKind, MeshFamily, Sampling, StabChoice};
pub use experiments::{run, write_outputs, FieldDump, RunContext, RunOutput};

use thiserror::Error;
use trefftz_vem::analysis::AnalysisError;
use trefftz_vem::assembly::AssemblyError;
use trefftz_vem::mesh::MeshError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(String),
    #[error("unknown experiment `{0}` (see `trefftz-vem list`)")]
    UnknownExperiment(String),
    #[error("mesh: {0}")]
    Mesh(#[from] MeshError),
    #[error("assembly: {0}")]
    Assembly(#[from] AssemblyError),
    #[error("analysis: {0}")]
    Analysis(#[from] AnalysisError),
    #[error("io: {0}")]
    Io(String),
}
