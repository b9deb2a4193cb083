//! Experiment manifests (TOML) and their validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use trefftz_vem::mesh::BoundaryLabel;
use trefftz_vem::problems::{ScatteringKind, SolutionTag};

use crate::ExperimentError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    H,
    P,
    Hp,
    Scattering,
    Condition,
    Eigen,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisChoice {
    /// Trace filtering (original method).
    Filtered,
    /// Eigenvector basis of the edge mass matrix.
    Orthonormal,
    /// Same, with eigenvectors scaled to unit norm.
    OrthonormalScaled,
}

impl BasisChoice {
    pub fn tag(self) -> &'static str {
        match self {
            Self::Filtered => "filtered",
            Self::Orthonormal => "orthonormal",
            Self::OrthonormalScaled => "orthonormal-scaled",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabChoice {
    DRecipe,
    Identity,
}

impl StabChoice {
    pub fn tag(self) -> &'static str {
        match self {
            Self::DRecipe => "d-recipe",
            Self::Identity => "identity",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryChoice {
    Dirichlet,
    Neumann,
    #[default]
    Robin,
}

impl BoundaryChoice {
    pub fn label(self) -> BoundaryLabel {
        match self {
            Self::Dirichlet => BoundaryLabel::Dirichlet,
            Self::Neumann => BoundaryLabel::Neumann,
            Self::Robin => BoundaryLabel::Robin,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum MeshFamily {
    /// n×n squares on the unit square, one level per n.
    Cartesian {
        levels: Vec<usize>,
        #[serde(default)]
        boundary: BoundaryChoice,
    },
    /// Mesh files, one level (or one p-version mesh) per path.
    Files {
        paths: Vec<String>,
        /// Relabels every non-scatterer boundary edge.
        boundary: Option<BoundaryChoice>,
    },
    /// (−1,2)×(0,3) minus [0,1]×[1,2].
    Hole { levels: Vec<usize> },
    /// Unit square graded toward (0, 0.5).
    Graded { levels: Vec<usize>, mu: Vec<f64> },
}

impl MeshFamily {
    pub fn len(&self) -> usize {
        match self {
            Self::Cartesian { levels, .. } | Self::Hole { levels } | Self::Graded { levels, .. } => levels.len(),
            Self::Files { paths, .. } => paths.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Inclusive range sampled at `count` points, geometrically when `log`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub log: bool,
}

impl Sampling {
    pub fn points(&self) -> Vec<f64> {
        let n = self.count.max(1);
        if n == 1 {
            return vec![self.min];
        }
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                if self.log {
                    (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp()
                } else {
                    self.min + t * (self.max - self.min)
                }
            })
            .collect()
    }
}

fn default_basis() -> Vec<BasisChoice> {
    vec![BasisChoice::Orthonormal]
}

fn default_stab() -> Vec<StabChoice> {
    vec![StabChoice::DRecipe]
}

fn default_sigma() -> Vec<f64> {
    vec![1e-13]
}

fn default_theta() -> f64 {
    1.0
}

fn default_depth() -> usize {
    10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub kind: ExperimentKind,
    pub mesh: Option<MeshFamily>,
    #[serde(default)]
    pub k: Vec<f64>,
    /// Degrees: one per series for h-studies, the sweep for p-studies.
    #[serde(default)]
    pub q: Vec<usize>,
    #[serde(default = "default_basis")]
    pub basis: Vec<BasisChoice>,
    #[serde(default = "default_stab")]
    pub stabilization: Vec<StabChoice>,
    #[serde(default = "default_sigma")]
    pub sigma: Vec<f64>,
    #[serde(default = "default_theta")]
    pub theta: f64,
    /// Exact solution tag (u0 … u4) for h/p/hp studies.
    pub solution: Option<String>,
    /// `soft` and/or `hard`.
    #[serde(default)]
    pub scatterer: Vec<String>,
    /// Incident plane waves (u0, u1, u4).
    #[serde(default)]
    pub incident: Vec<String>,
    /// Hole-mesh level of the reference solution.
    pub reference_level: Option<usize>,
    /// Points per side of the field dump grid; 0 disables the dump.
    #[serde(default)]
    pub field_grid: usize,
    /// Add the DOF count of the filtered method to each row.
    #[serde(default)]
    pub original: bool,
    /// Condition probe: h·k samples.
    pub hk: Option<Sampling>,
    /// Eigenvalue probe: k samples.
    pub k_samples: Option<Sampling>,
    #[serde(default = "default_depth")]
    pub quadrature_depth: usize,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ExperimentError> {
        toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ExperimentError> {
        let p = path.as_ref();
        let text = std::fs::read_to_string(p).map_err(|e| ExperimentError::Io(format!("{}: {e}", p.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn solution_tag(&self) -> Result<SolutionTag, ExperimentError> {
        let s = self.solution.as_deref().ok_or_else(|| ExperimentError::Config(format!("{}: `solution` is required", self.name)))?;
        s.parse().map_err(ExperimentError::Config)
    }

    pub fn scatterers(&self) -> Result<Vec<ScatteringKind>, ExperimentError> {
        self.scatterer.iter().map(|s| s.parse().map_err(ExperimentError::Config)).collect()
    }

    pub fn incidents(&self) -> Result<Vec<SolutionTag>, ExperimentError> {
        self.incident
            .iter()
            .map(|s| {
                let t: SolutionTag = s.parse().map_err(ExperimentError::Config)?;
                match t {
                    SolutionTag::U0 | SolutionTag::U1 | SolutionTag::U4 => Ok(t),
                    _ => Err(ExperimentError::Config(format!("incident `{s}` is not a plane wave"))),
                }
            })
            .collect()
    }

    fn mesh_family(&self) -> Result<&MeshFamily, ExperimentError> {
        self.mesh.as_ref().ok_or_else(|| ExperimentError::Config(format!("{}: `mesh` is required", self.name)))
    }

    /// Checks everything that can be checked before running; mesh paths
    /// are resolved against `root`.
    pub fn validate(&self, root: &Path) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::Config(format!("{}: {m}", self.name)));
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return bad("name must be a plain identifier".into());
        }
        if self.k.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
            return bad("every k must be positive".into());
        }
        if self.sigma.iter().any(|s| !(*s > 0.0)) {
            return bad("σ must be positive".into());
        }
        if self.theta.abs() != 1.0 {
            return bad("θ must be ±1".into());
        }
        let needs_k = !matches!(self.kind, ExperimentKind::Condition);
        if needs_k && self.k.is_empty() {
            return bad("`k` is empty".into());
        }
        match self.kind {
            ExperimentKind::H | ExperimentKind::P | ExperimentKind::Hp => {
                self.solution_tag()?;
                let fam = self.mesh_family()?;
                if fam.is_empty() {
                    return bad("mesh family has no levels".into());
                }
                if self.kind != ExperimentKind::Hp && self.q.is_empty() {
                    return bad("`q` is empty".into());
                }
                match (self.kind, fam) {
                    (ExperimentKind::Hp, MeshFamily::Graded { mu, .. }) => {
                        if mu.is_empty() || mu.iter().any(|m| !(*m > 0.0 && *m < 1.0)) {
                            return bad("μ must lie in (0, 1)".into());
                        }
                    }
                    (ExperimentKind::Hp, _) => return bad("hp studies need a graded mesh family".into()),
                    (_, MeshFamily::Hole { .. }) => return bad("hole meshes are for scattering runs".into()),
                    _ => {}
                }
            }
            ExperimentKind::Scattering => {
                if !matches!(self.mesh_family()?, MeshFamily::Hole { .. }) {
                    return bad("scattering runs need the hole mesh family".into());
                }
                if self.scatterers()?.is_empty() || self.incidents()?.is_empty() || self.q.is_empty() {
                    return bad("`scatterer`, `incident` and `q` must be non-empty".into());
                }
                let MeshFamily::Hole { levels } = self.mesh_family()? else { unreachable!() };
                let r = self.reference_level.ok_or_else(|| ExperimentError::Config(format!("{}: `reference_level` is required", self.name)))?;
                if levels.iter().any(|&l| l > r) {
                    return bad("reference level must be at least the finest compared level".into());
                }
            }
            ExperimentKind::Condition => {
                if self.q.is_empty() || self.hk.is_none() {
                    return bad("`q` and `hk` are required".into());
                }
            }
            ExperimentKind::Eigen => {
                if self.q.is_empty() || self.k_samples.is_none() {
                    return bad("`q` and `k_samples` are required".into());
                }
            }
        }
        if let Some(MeshFamily::Files { paths, .. }) = &self.mesh {
            for p in paths {
                let r = resolve_path(root, p);
                if !r.is_file() {
                    return bad(format!("mesh file `{}` not found", r.display()));
                }
            }
        }
        Ok(())
    }
}

/// `p` relative to `root` unless absolute.
pub fn resolve_path(root: &Path, p: &str) -> PathBuf {
    let path = Path::new(p);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        root.join(path)
    }
}

/// Directory that relative mesh paths are resolved against: the current
/// directory when it holds `meshes/`, else the workspace root.
pub fn default_root() -> PathBuf {
    let cwd = std::env::current_dir().unwrap_or_else(|_| PathBuf::from("."));
    if cwd.join("meshes").is_dir() {
        return cwd;
    }
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}
