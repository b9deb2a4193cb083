use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use trefftz_vem::analysis::{projected_errors, QuadratureOptions};
use trefftz_vem::assembly::{assemble_and_solve, AssemblyOptions};
use trefftz_vem::mesh::{build_cartesian_mesh, build_graded_mesh, build_hole_mesh, load_mesh, GradedMeshSpec, Rect, SideLabels};
use trefftz_vem::problems::{make_scattering, ScatteringKind, SolutionTag};
use trefftz_vem::{AnalyticSolution, DirectionLayout, Mesh, ProblemSpec};
use trefftz_vem_cli::config::default_root;
use trefftz_vem_cli::experiments::{basis_kind, sample_field, stabilization};
use trefftz_vem_cli::{registry, run, write_outputs, BasisChoice, ExperimentConfig, ExperimentError, MeshFamily, RunContext, StabChoice};

#[derive(Parser)]
#[command(name = "trefftz-vem", version, about = "Nonconforming Trefftz VEM for the 2D Helmholtz equation")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List registered experiments.
    List,
    /// Run an experiment and write CSV to results/<name>/.
    Run(RunArgs),
    /// Solve one problem on one mesh and print the report.
    Solve(SolveArgs),
}

fn parse_basis(s: &str) -> Result<BasisChoice, String> {
    match s {
        "filtered" => Ok(BasisChoice::Filtered),
        "orthonormal" => Ok(BasisChoice::Orthonormal),
        "orthonormal-scaled" => Ok(BasisChoice::OrthonormalScaled),
        _ => Err(format!("unknown basis `{s}`")),
    }
}

fn parse_stab(s: &str) -> Result<StabChoice, String> {
    match s {
        "d-recipe" => Ok(StabChoice::DRecipe),
        "identity" => Ok(StabChoice::Identity),
        _ => Err(format!("unknown stabilization `{s}`")),
    }
}

#[derive(Args)]
struct RunArgs {
    /// Registered experiment name (optional with --config).
    name: Option<String>,
    /// Manifest file instead of (or overriding the name of) a registered one.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory [default: results/<name>].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory relative mesh paths are resolved against.
    #[arg(long)]
    root: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<usize>>,
    /// Levels of Cartesian, hole or graded families.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<usize>>,
    /// Mesh files of a file family.
    #[arg(long, value_delimiter = ',')]
    mesh_files: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    mu: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', value_parser = parse_basis)]
    basis: Option<Vec<BasisChoice>>,
    #[arg(long, value_delimiter = ',', value_parser = parse_stab)]
    stab: Option<Vec<StabChoice>>,
    #[arg(long, value_delimiter = ',')]
    sigma: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long)]
    solution: Option<String>,
    #[arg(long)]
    reference_level: Option<usize>,
    #[arg(long)]
    original: Option<bool>,
    #[arg(long)]
    quiet: bool,
}

impl RunArgs {
    fn config(&self) -> Result<ExperimentConfig, ExperimentError> {
        let mut cfg = match (&self.config, &self.name) {
            (Some(p), name) => {
                let mut c = ExperimentConfig::load(p)?;
                if let Some(n) = name {
                    c.name = n.clone();
                }
                c
            }
            (None, Some(n)) => registry::lookup(n)?,
            (None, None) => return Err(ExperimentError::Config("give an experiment name or --config".into())),
        };
        if let Some(v) = &self.k {
            cfg.k = v.clone();
        }
        if let Some(v) = &self.q {
            cfg.q = v.clone();
        }
        if let Some(v) = &self.basis {
            cfg.basis = v.clone();
        }
        if let Some(v) = &self.stab {
            cfg.stabilization = v.clone();
        }
        if let Some(v) = &self.sigma {
            cfg.sigma = v.clone();
        }
        if let Some(v) = self.theta {
            cfg.theta = v;
        }
        if let Some(v) = &self.solution {
            cfg.solution = Some(v.clone());
        }
        if let Some(v) = self.reference_level {
            cfg.reference_level = Some(v);
        }
        if let Some(v) = self.original {
            cfg.original = v;
        }
        match (&mut cfg.mesh, &self.levels, &self.mesh_files, &self.mu) {
            (Some(MeshFamily::Cartesian { levels, .. } | MeshFamily::Hole { levels } | MeshFamily::Graded { levels, .. }), Some(l), _, _) => {
                *levels = l.clone()
            }
            (Some(_), Some(_), _, _) => return Err(ExperimentError::Config("--levels needs a generated mesh family".into())),
            _ => {}
        }
        if let Some(files) = &self.mesh_files {
            let boundary = match &cfg.mesh {
                Some(MeshFamily::Files { boundary, .. }) => *boundary,
                _ => None,
            };
            cfg.mesh = Some(MeshFamily::Files { paths: files.clone(), boundary });
        }
        if let Some(m) = &self.mu {
            match &mut cfg.mesh {
                Some(MeshFamily::Graded { mu, .. }) => *mu = m.clone(),
                _ => return Err(ExperimentError::Config("--mu needs a graded mesh family".into())),
            }
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, group = "meshsrc")]
    mesh: Option<PathBuf>,
    #[arg(long, group = "meshsrc")]
    cartesian: Option<usize>,
    #[arg(long, group = "meshsrc")]
    hole: Option<usize>,
    /// Graded mesh: levels and grading parameter.
    #[arg(long, group = "meshsrc", num_args = 2, value_names = ["N", "MU"])]
    graded: Option<Vec<f64>>,
    /// Exact solution u0 … u4 (boundary value problem).
    #[arg(long, conflicts_with = "scatter")]
    solution: Option<String>,
    /// Scattering by the hole: soft or hard.
    #[arg(long)]
    scatter: Option<String>,
    #[arg(long, default_value = "u0")]
    incident: String,
    #[arg(long)]
    k: f64,
    /// Effective degree (ignored on graded meshes).
    #[arg(long, default_value_t = 4)]
    q: usize,
    #[arg(long, default_value = "orthonormal", value_parser = parse_basis)]
    basis: BasisChoice,
    #[arg(long, default_value = "d-recipe", value_parser = parse_stab)]
    stab: StabChoice,
    #[arg(long, default_value_t = 1e-13)]
    sigma: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    theta: f64,
    /// Write Π_p u_h sampled on a grid to this CSV.
    #[arg(long)]
    field: Option<PathBuf>,
    #[arg(long, default_value_t = 101)]
    grid: usize,
}

fn solve(a: &SolveArgs) -> Result<(), ExperimentError> {
    let cfgerr = |m: &str| ExperimentError::Config(m.to_string());
    let mut degrees = None;
    let mesh: Mesh = if let Some(p) = &a.mesh {
        load_mesh(p)?
    } else if let Some(n) = a.cartesian {
        build_cartesian_mesh(n.max(1), Rect::unit(), SideLabels::uniform(trefftz_vem::mesh::BoundaryLabel::Robin))
    } else if let Some(l) = a.hole {
        build_hole_mesh(l)
    } else if let Some(g) = &a.graded {
        let gm = build_graded_mesh(GradedMeshSpec::new(g[0] as usize, g[1]))?;
        degrees = Some(gm.degree);
        gm.mesh
    } else {
        return Err(cfgerr("give --mesh, --cartesian, --hole or --graded"));
    };
    let layout = match &degrees {
        Some(d) => DirectionLayout::hp(d),
        None => DirectionLayout::uniform(a.q, mesh.elements.len()),
    };
    let (spec, exact): (ProblemSpec, Option<AnalyticSolution>) = match (&a.solution, &a.scatter) {
        (Some(s), None) => {
            let tag: SolutionTag = s.parse().map_err(ExperimentError::Config)?;
            let sol = AnalyticSolution::new(tag, a.k);
            (ProblemSpec::from_solution(sol, a.theta), Some(sol))
        }
        (None, Some(kind)) => {
            let kind: ScatteringKind = kind.parse().map_err(ExperimentError::Config)?;
            let inc: SolutionTag = a.incident.parse().map_err(ExperimentError::Config)?;
            if !matches!(inc, SolutionTag::U0 | SolutionTag::U1 | SolutionTag::U4) {
                return Err(cfgerr("incident field must be u0, u1 or u4"));
            }
            (make_scattering(kind, inc, a.k), None)
        }
        _ => return Err(cfgerr("give exactly one of --solution and --scatter")),
    };
    let opts = AssemblyOptions { stabilization: stabilization(a.stab), strict_singular: false };
    let sys = assemble_and_solve(&mesh, &spec, layout, basis_kind(a.basis, a.sigma), opts)?;
    println!("elements={} h={:.6e} {}", mesh.elements.len(), mesh.h, sys.report.summary());
    if let Some(sol) = exact {
        let e = projected_errors(&sys, &sol, &QuadratureOptions::default())?;
        println!("relH1={:.6e} relL2={:.6e} quad_unconverged={}", e.rel_h1, e.rel_l2, e.unconverged_elements);
    }
    if let Some(p) = &a.field {
        let out = trefftz_vem_cli::RunOutput::Scattering {
            table: Default::default(),
            fields: vec![trefftz_vem_cli::FieldDump { name: "field".into(), samples: sample_field(&sys, a.grid) }],
        };
        let (_, text) = out.files().pop().expect("field file");
        std::fs::write(p, text).map_err(|e| ExperimentError::Io(format!("{}: {e}", p.display())))?;
        println!("field written to {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Command::List => {
            for name in registry::names() {
                let cfg = registry::lookup(name).expect("registered manifests parse");
                println!("{name:<22} {}", cfg.description);
            }
            Ok(())
        }
        Command::Run(args) => args.config().and_then(|cfg| {
            let ctx = RunContext { root: args.root.clone().unwrap_or_else(default_root), verbose: !args.quiet };
            let out = run(&cfg, &ctx)?;
            let dir = args.out.clone().unwrap_or_else(|| PathBuf::from("results").join(&cfg.name));
            write_outputs(&dir, &cfg, &out)?;
            if let Some(t) = out.table() {
                print!("{}", t.to_csv_string());
            }
            println!("results written to {}", dir.display());
            Ok(())
        }),
        Command::Solve(a) => solve(&a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
