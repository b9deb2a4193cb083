//! Runners for the h-, p-, hp- and scattering studies and the matrix probes.

use std::path::Path;

use rayon::prelude::*;
use trefftz_vem::analysis::{
    condition_probe, neumann_eig_probe, projected_errors, projected_errors_against, ConditionRow, EigenRow, ErrorRow,
    ErrorTable, PiecewisePlaneWaves, QuadratureOptions, RowStatus,
};
use trefftz_vem::assembly::{assemble_and_solve, AssemblyOptions, Discretization, Stabilization};
use trefftz_vem::mesh::{build_cartesian_mesh, build_graded_mesh, build_hole_mesh, load_mesh, BoundaryLabel, GradedMeshSpec, Rect, SideLabels};
use trefftz_vem::planewave::OrthoOptions;
use trefftz_vem::problems::{make_scattering, ScatteringKind};
use trefftz_vem::{AnalyticSolution, BasisKind, DirectionLayout, GlobalSystem, Mesh, Point, ProblemSpec};

use crate::config::{resolve_path, BasisChoice, ExperimentConfig, ExperimentKind, MeshFamily, StabChoice};
use crate::ExperimentError;

/// Sampled total field (x, y, Re u, Im u) on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldDump {
    pub name: String,
    pub samples: Vec<[f64; 4]>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunOutput {
    Errors(ErrorTable),
    Scattering { table: ErrorTable, fields: Vec<FieldDump> },
    Condition(Vec<ConditionRow>),
    Eigen(Vec<(usize, EigenRow)>),
}

impl RunOutput {
    pub fn table(&self) -> Option<&ErrorTable> {
        match self {
            Self::Errors(t) | Self::Scattering { table: t, .. } => Some(t),
            _ => None,
        }
    }

    /// (file name, contents) pairs written to the result directory.
    pub fn files(&self) -> Vec<(String, String)> {
        match self {
            Self::Errors(t) => vec![("errors.csv".into(), t.to_csv_string())],
            Self::Scattering { table, fields } => {
                let mut out = vec![("errors.csv".into(), table.to_csv_string())];
                for f in fields {
                    let rows = f.samples.iter().map(|s| {
                        [format!("{:.9e}", s[0]), format!("{:.9e}", s[1]), format!("{:.9e}", s[2]), format!("{:.9e}", s[3])]
                    });
                    out.push((format!("{}.csv", f.name), csv_string(&["x", "y", "re", "im"], rows)));
                }
                out
            }
            Self::Condition(rows) => {
                let recs = rows.iter().map(|r| {
                    [
                        r.q.to_string(),
                        format!("{:.6e}", r.hk),
                        format!("{:.6e}", r.lambda_min),
                        format!("{:.6e}", r.lambda_max),
                        format!("{:.6e}", r.cond),
                    ]
                });
                vec![("condition.csv".into(), csv_string(&["q", "hk", "lambda_min", "lambda_max", "cond"], recs))]
            }
            Self::Eigen(rows) => {
                let recs = rows.iter().map(|(q, r)| [q.to_string(), format!("{:.6e}", r.k), format!("{:.6e}", r.min_abs_eig)]);
                vec![("eigen.csv".into(), csv_string(&["q", "k", "min_abs_eig"], recs))]
            }
        }
    }
}

fn csv_string<const N: usize>(header: &[&str; N], rows: impl Iterator<Item = [String; N]>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for r in rows {
        w.write_record(&r).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8")
}

#[derive(Clone, Debug)]
pub struct RunContext {
    /// Relative mesh paths are resolved against this directory.
    pub root: std::path::PathBuf,
    /// Progress lines on stderr.
    pub verbose: bool,
}

impl Default for RunContext {
    fn default() -> Self {
        Self { root: crate::config::default_root(), verbose: false }
    }
}

impl RunContext {
    fn log(&self, msg: impl FnOnce() -> String) {
        if self.verbose {
            eprintln!("{}", msg());
        }
    }
}

/// Validates `cfg` and dispatches on its kind.
pub fn run(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<RunOutput, ExperimentError> {
    cfg.validate(&ctx.root)?;
    match cfg.kind {
        ExperimentKind::H => run_h_version(cfg, ctx).map(RunOutput::Errors),
        ExperimentKind::P => run_p_version(cfg, ctx).map(RunOutput::Errors),
        ExperimentKind::Hp => run_hp_version(cfg, ctx).map(RunOutput::Errors),
        ExperimentKind::Scattering => run_scattering(cfg, ctx),
        ExperimentKind::Condition => {
            let hk = cfg.hk.expect("validated").points();
            let k = cfg.k.first().copied().unwrap_or(1.0);
            Ok(RunOutput::Condition(condition_probe(k, &cfg.q, &hk)?))
        }
        ExperimentKind::Eigen => {
            let ks = cfg.k_samples.expect("validated").points();
            let mut rows = Vec::new();
            for &q in &cfg.q {
                rows.extend(neumann_eig_probe::<f64>(q, &ks)?.into_iter().map(|r| (q, r)));
            }
            Ok(RunOutput::Eigen(rows))
        }
    }
}

/// Writes every output file plus the resolved config to `dir`.
pub fn write_outputs(dir: &Path, cfg: &ExperimentConfig, out: &RunOutput) -> Result<(), ExperimentError> {
    std::fs::create_dir_all(dir).map_err(|e| ExperimentError::Io(format!("{}: {e}", dir.display())))?;
    let mut files = out.files();
    files.push(("config.toml".into(), cfg.to_toml()));
    for (name, text) in files {
        let p = dir.join(name);
        std::fs::write(&p, text).map_err(|e| ExperimentError::Io(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

pub fn basis_kind(choice: BasisChoice, sigma: f64) -> BasisKind {
    match choice {
        BasisChoice::Filtered => BasisKind::Filtered,
        BasisChoice::Orthonormal => BasisKind::Orthonormal(OrthoOptions { sigma, ..Default::default() }),
        BasisChoice::OrthonormalScaled => BasisKind::Orthonormal(OrthoOptions { sigma, scaled: true, ..Default::default() }),
    }
}

pub fn stabilization(choice: StabChoice) -> Stabilization {
    match choice {
        StabChoice::DRecipe => Stabilization::ModifiedDRecipe,
        StabChoice::Identity => Stabilization::Identity,
    }
}

/// One mesh of a family with its display label.
pub struct LevelMesh {
    pub label: String,
    pub mesh: Mesh,
    /// Element degrees of graded meshes.
    pub degrees: Option<Vec<usize>>,
}

/// The `i`-th mesh of a family (μ selects the graded family member).
pub fn build_level(fam: &MeshFamily, i: usize, mu: Option<f64>, root: &Path) -> Result<LevelMesh, ExperimentError> {
    Ok(match fam {
        MeshFamily::Cartesian { levels, boundary } => {
            let n = levels[i];
            if n == 0 {
                return Err(ExperimentError::Config("Cartesian level must be at least 1".into()));
            }
            LevelMesh {
                label: n.to_string(),
                mesh: build_cartesian_mesh(n, Rect::unit(), SideLabels::uniform(boundary.label())),
                degrees: None,
            }
        }
        MeshFamily::Files { paths, boundary } => {
            let p = resolve_path(root, &paths[i]);
            let mut mesh: Mesh = load_mesh(&p)?;
            if let Some(b) = boundary {
                let l = b.label();
                mesh.relabel(|old, _, _| if old == BoundaryLabel::Scatterer { old } else { l });
            }
            let label = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| paths[i].clone());
            LevelMesh { label, mesh, degrees: None }
        }
        MeshFamily::Hole { levels } => LevelMesh { label: levels[i].to_string(), mesh: build_hole_mesh(levels[i]), degrees: None },
        MeshFamily::Graded { levels, .. } => {
            let mu = mu.ok_or_else(|| ExperimentError::Config("graded meshes need μ".into()))?;
            let g = build_graded_mesh(GradedMeshSpec::new(levels[i], mu))?;
            LevelMesh { label: levels[i].to_string(), mesh: g.mesh, degrees: Some(g.degree) }
        }
    })
}

/// Basis, stabilization and σ of one series.
#[derive(Clone, Copy, Debug)]
struct Method {
    basis: BasisChoice,
    stab: StabChoice,
    sigma: f64,
}

impl Method {
    fn all(cfg: &ExperimentConfig) -> Vec<Self> {
        let mut out = Vec::new();
        for &basis in &cfg.basis {
            for &stab in &cfg.stabilization {
                for &sigma in &cfg.sigma {
                    out.push(Self { basis, stab, sigma });
                }
            }
        }
        out
    }

    fn columns(&self) -> [String; 3] {
        [self.basis.tag().into(), self.stab.tag().into(), format!("{:e}", self.sigma)]
    }
}

fn quad_opts(cfg: &ExperimentConfig) -> QuadratureOptions {
    QuadratureOptions { max_depth: cfg.quadrature_depth, ..Default::default() }
}

fn status_flags(sys: &GlobalSystem<'_>, unconverged: usize, extra: &[&str]) -> RowStatus {
    let mut flags: Vec<String> = extra.iter().map(|s| s.to_string()).collect();
    if !sys.report.residual_ok() {
        flags.push(format!("residual={:.2e}", sys.report.residual));
    }
    if !sys.report.near_singular.is_empty() {
        flags.push(format!("near_singular={}", sys.report.near_singular.len()));
    }
    if unconverged > 0 {
        flags.push(format!("quad_unconverged={unconverged}"));
    }
    RowStatus::from_flags(flags)
}

/// Solves one configuration and measures it against the exact solution.
fn solve_row(
    extra: Vec<String>,
    mesh: &Mesh,
    layout: DirectionLayout,
    method: Method,
    sol: AnalyticSolution,
    cfg: &ExperimentConfig,
    flags: &[&str],
) -> ErrorRow {
    let h = mesh.h;
    let spec = ProblemSpec::from_solution(sol, cfg.theta);
    let ndof_orig = if cfg.original {
        Discretization::new(mesh, layout.clone(), BasisKind::Filtered, sol.k).ok().map(|d| d.ndof())
    } else {
        None
    };
    let opts = AssemblyOptions { stabilization: stabilization(method.stab), strict_singular: false };
    let sys = match assemble_and_solve(mesh, &spec, layout, basis_kind(method.basis, method.sigma), opts) {
        Ok(s) => s,
        Err(e) => return ErrorRow::failed(extra, h, e.to_string()),
    };
    let err = match projected_errors(&sys, &sol, &quad_opts(cfg)) {
        Ok(e) => e,
        Err(e) => {
            let mut row = ErrorRow::failed(extra, h, e.to_string());
            row.ndof = sys.report.ndof;
            return row;
        }
    };
    ErrorRow {
        extra,
        h,
        ndof: sys.report.ndof,
        rel_h1: err.rel_h1,
        rel_l2: err.rel_l2,
        ndof_orig,
        residual: sys.report.residual,
        max_edge_cond: sys.report.max_edge_cond,
        status: status_flags(&sys, err.unconverged_elements, flags),
    }
}

fn log_row(ctx: &RunContext, name: &str, r: &ErrorRow) {
    ctx.log(|| {
        format!(
            "[{name}] {} h={:.3e} ndof={} relH1={:.4e} relL2={:.4e} {}",
            r.extra.join(" "),
            r.h,
            r.ndof,
            r.rel_h1,
            r.rel_l2,
            r.status.label()
        )
    });
}

/// Error table over mesh levels; columns k, q, basis, stab, sigma, level.
pub fn run_h_version(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<ErrorTable, ExperimentError> {
    let tag = cfg.solution_tag()?;
    let fam = cfg.mesh.as_ref().expect("validated");
    // Voronoi-type file families are not nested; rates are indicative only
    let flags: &[&str] = if matches!(fam, MeshFamily::Files { paths, .. } if paths.len() > 1) { &["non_nested"] } else { &[] };
    let meshes: Vec<LevelMesh> = (0..fam.len()).map(|i| build_level(fam, i, None, &ctx.root)).collect::<Result<_, _>>()?;
    let mut jobs = Vec::new();
    for &k in &cfg.k {
        for &q in &cfg.q {
            for m in Method::all(cfg) {
                for lvl in 0..meshes.len() {
                    jobs.push((k, q, m, lvl));
                }
            }
        }
    }
    let rows: Vec<ErrorRow> = jobs
        .par_iter()
        .map(|&(k, q, m, lvl)| {
            let lm = &meshes[lvl];
            let [b, s, sg] = m.columns();
            let extra = vec![fmt_k(k), q.to_string(), b, s, sg, lm.label.clone()];
            let layout = DirectionLayout::uniform(q, lm.mesh.elements.len());
            let row = solve_row(extra, &lm.mesh, layout, m, AnalyticSolution::new(tag, k), cfg, flags);
            log_row(ctx, &cfg.name, &row);
            row
        })
        .collect();
    let mut t = ErrorTable::new(cols(&["k", "q", "basis", "stab", "sigma", "level"])).with_series(5);
    t.rows = rows;
    Ok(t)
}

/// Error table over q on fixed meshes; columns mesh, k, basis, stab, sigma, q.
pub fn run_p_version(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<ErrorTable, ExperimentError> {
    let tag = cfg.solution_tag()?;
    let fam = cfg.mesh.as_ref().expect("validated");
    let meshes: Vec<LevelMesh> = (0..fam.len()).map(|i| build_level(fam, i, None, &ctx.root)).collect::<Result<_, _>>()?;
    let mut jobs = Vec::new();
    for mi in 0..meshes.len() {
        for &k in &cfg.k {
            for m in Method::all(cfg) {
                for &q in &cfg.q {
                    jobs.push((mi, k, m, q));
                }
            }
        }
    }
    let rows: Vec<ErrorRow> = jobs
        .par_iter()
        .map(|&(mi, k, m, q)| {
            let lm = &meshes[mi];
            let [b, s, sg] = m.columns();
            let extra = vec![lm.label.clone(), fmt_k(k), b, s, sg, q.to_string()];
            let layout = DirectionLayout::uniform(q, lm.mesh.elements.len());
            let row = solve_row(extra, &lm.mesh, layout, m, AnalyticSolution::new(tag, k), cfg, &[]);
            log_row(ctx, &cfg.name, &row);
            row
        })
        .collect();
    let mut t = ErrorTable::new(cols(&["mesh", "k", "basis", "stab", "sigma", "q"])).with_series(5);
    t.rows = rows;
    Ok(t)
}

/// Graded-mesh study; columns k, mu, basis, stab, sigma, level, q_max,
/// sqrt_ndof.
pub fn run_hp_version(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<ErrorTable, ExperimentError> {
    let tag = cfg.solution_tag()?;
    let fam = cfg.mesh.as_ref().expect("validated");
    let MeshFamily::Graded { mu: mus, .. } = fam else {
        return Err(ExperimentError::Config("hp studies need a graded mesh family".into()));
    };
    let mut meshes = Vec::new();
    for &mu in mus {
        for i in 0..fam.len() {
            meshes.push((mu, build_level(fam, i, Some(mu), &ctx.root)?));
        }
    }
    let mut jobs = Vec::new();
    for &k in &cfg.k {
        for mi in 0..meshes.len() {
            for m in Method::all(cfg) {
                jobs.push((k, mi, m));
            }
        }
    }
    // series order: k, mu, method, then level
    jobs.sort_by(|a, b| {
        let key = |j: &(f64, usize, Method)| (j.0.to_bits(), meshes[j.1].0.to_bits(), j.2.columns(), j.1);
        key(a).cmp(&key(b))
    });
    let rows: Vec<ErrorRow> = jobs
        .par_iter()
        .map(|&(k, mi, m)| {
            let (mu, lm) = &meshes[mi];
            let degrees = lm.degrees.as_ref().expect("graded meshes carry degrees");
            let q_max = degrees.iter().copied().max().unwrap_or(1);
            let [b, s, sg] = m.columns();
            let mut extra = vec![fmt_k(k), format!("{mu:.6}"), b, s, sg, lm.label.clone(), q_max.to_string()];
            let layout = DirectionLayout::hp(degrees);
            let mut row = solve_row(extra.clone(), &lm.mesh, layout, m, AnalyticSolution::new(tag, k), cfg, &[]);
            extra.push(format!("{:.6}", (row.ndof as f64).sqrt()));
            row.extra = extra;
            log_row(ctx, &cfg.name, &row);
            row
        })
        .collect();
    let mut t = ErrorTable::new(cols(&["k", "mu", "basis", "stab", "sigma", "level", "q_max", "sqrt_ndof"])).with_series(5);
    t.rows = rows;
    Ok(t)
}

/// Scattering by the square hole against the reference-level solution;
/// columns kind, incident, k, q, basis, stab, sigma, level. The reference
/// level itself is the last row of each series.
pub fn run_scattering(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<RunOutput, ExperimentError> {
    let Some(MeshFamily::Hole { levels }) = &cfg.mesh else {
        return Err(ExperimentError::Config("scattering runs need the hole mesh family".into()));
    };
    let reference_level = cfg.reference_level.expect("validated");
    let ref_mesh: Mesh = build_hole_mesh(reference_level);
    let meshes: Vec<(usize, Mesh)> = levels.iter().map(|&l| (l, build_hole_mesh(l))).collect();
    let qopts = quad_opts(cfg);
    let mut table = ErrorTable::new(cols(&["kind", "incident", "k", "q", "basis", "stab", "sigma", "level"])).with_series(7);
    let mut fields = Vec::new();
    for kind in cfg.scatterers()? {
        for incident in cfg.incidents()? {
            for &k in &cfg.k {
                for &q in &cfg.q {
                    for m in Method::all(cfg) {
                        let spec = make_scattering(kind, incident, k);
                        let opts = AssemblyOptions { stabilization: stabilization(m.stab), strict_singular: false };
                        let [b, s, sg] = m.columns();
                        let head = vec![kind_tag(kind).to_string(), incident.to_string(), fmt_k(k), q.to_string(), b, s, sg];
                        let ref_layout = DirectionLayout::uniform(q, ref_mesh.elements.len());
                        let reference = assemble_and_solve(&ref_mesh, &spec, ref_layout, basis_kind(m.basis, m.sigma), opts)?;
                        ctx.log(|| format!("[{}] reference level {reference_level}: {}", cfg.name, reference.report.summary()));
                        let mut rows: Vec<ErrorRow> = meshes
                            .par_iter()
                            .map(|(l, mesh)| {
                                let mut extra = head.clone();
                                extra.push(l.to_string());
                                let layout = DirectionLayout::uniform(q, mesh.elements.len());
                                let row = match assemble_and_solve(mesh, &spec, layout, basis_kind(m.basis, m.sigma), opts) {
                                    Ok(sys) => scattering_row(extra, &sys, &reference, &qopts),
                                    Err(e) => ErrorRow::failed(extra, mesh.h, e.to_string()),
                                };
                                log_row(ctx, &cfg.name, &row);
                                row
                            })
                            .collect();
                        if !levels.contains(&reference_level) {
                            let mut extra = head.clone();
                            extra.push(reference_level.to_string());
                            rows.push(scattering_row(extra, &reference, &reference, &qopts));
                        }
                        table.rows.extend(rows);
                        if cfg.field_grid > 0 {
                            fields.push(FieldDump {
                                name: format!("field_{}_{}_k{}_q{q}", kind_tag(kind), incident, fmt_k(k)),
                                samples: sample_field(&reference, cfg.field_grid),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(RunOutput::Scattering { table, fields })
}

fn scattering_row(extra: Vec<String>, sys: &GlobalSystem<'_>, reference: &GlobalSystem<'_>, qopts: &QuadratureOptions) -> ErrorRow {
    let h = sys.disc.mesh.h;
    match projected_errors_against(sys, reference, qopts) {
        Ok(e) => ErrorRow {
            extra,
            h,
            ndof: sys.report.ndof,
            rel_h1: e.rel_h1,
            rel_l2: e.rel_l2,
            ndof_orig: None,
            residual: sys.report.residual,
            max_edge_cond: sys.report.max_edge_cond,
            status: status_flags(sys, e.unconverged_elements, &[]),
        },
        Err(e) => ErrorRow::failed(extra, h, e.to_string()),
    }
}

/// Π_p u_h on an n×n grid over the mesh bounding box; points outside the
/// mesh are skipped.
pub fn sample_field(sys: &GlobalSystem<'_>, n: usize) -> Vec<[f64; 4]> {
    let mesh = sys.disc.mesh;
    let pw = PiecewisePlaneWaves::from_system(sys);
    let (mut lo, mut hi) = (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for v in &mesh.vertices {
        lo = Point::new(lo.x.min(v.x), lo.y.min(v.y));
        hi = Point::new(hi.x.max(v.x), hi.y.max(v.y));
    }
    let n = n.max(2);
    let pts: Vec<Point> = (0..n)
        .flat_map(|j| {
            (0..n).map(move |i| {
                let t = |a: f64, b: f64, s: usize| a + (b - a) * s as f64 / (n - 1) as f64;
                Point::new(t(lo.x, hi.x, i), t(lo.y, hi.y, j))
            })
        })
        .collect();
    pts.par_iter()
        .filter_map(|&x| {
            let e = pw.locate(x)?;
            let (v, _) = pw.eval_on(e, x);
            Some([x.x, x.y, v.re, v.im])
        })
        .collect()
}

fn kind_tag(k: ScatteringKind) -> &'static str {
    match k {
        ScatteringKind::SoundSoft => "soft",
        ScatteringKind::SoundHard => "hard",
    }
}

fn fmt_k(k: f64) -> String {
    format!("{k}")
}

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}
