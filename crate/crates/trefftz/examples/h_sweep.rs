//! Quick h-refinement sweep on Cartesian meshes of the unit square.
//!
//! cargo run --release --example h_sweep -- u1 20 7 ortho 1,2,4,8

use std::time::Instant;

use trefftz_vem::analysis::{projected_errors, QuadratureOptions};
use trefftz_vem::assembly::{assemble_and_solve, AssemblyOptions, BasisKind, DirectionLayout, Stabilization};
use trefftz_vem::mesh::{build_cartesian_mesh, BoundaryLabel, Rect, SideLabels};
use trefftz_vem::planewave::OrthoOptions;
use trefftz_vem::problems::{AnalyticSolution, SolutionTag};
use trefftz_vem::ProblemSpec;

fn main() {
    let a: Vec<String> = std::env::args().collect();
    let tag: SolutionTag = a.get(1).map(|s| s.parse().unwrap()).unwrap_or(SolutionTag::U1);
    let k: f64 = a.get(2).map(|s| s.parse().unwrap()).unwrap_or(20.0);
    let q: usize = a.get(3).map(|s| s.parse().unwrap()).unwrap_or(7);
    let basis = match a.get(4).map(String::as_str).unwrap_or("ortho") {
        "filtered" => BasisKind::Filtered,
        "unscaled" => BasisKind::Orthonormal(OrthoOptions { scaled: false, ..Default::default() }),
        _ => BasisKind::Orthonormal(OrthoOptions::default()),
    };
    let ns: Vec<usize> = a.get(5).map(|s| s.split(',').map(|v| v.parse().unwrap()).collect()).unwrap_or(vec![1, 2, 4, 8]);
    let stab = if a.get(6).map(String::as_str) == Some("identity") { Stabilization::Identity } else { Stabilization::ModifiedDRecipe };
    let sol = AnalyticSolution::new(tag, k);
    let spec = ProblemSpec::from_solution(sol, 1.0);
    for n in ns {
        let t = Instant::now();
        let mesh = build_cartesian_mesh(n, Rect::unit(), SideLabels::uniform(BoundaryLabel::Robin));
        let sys = assemble_and_solve(
            &mesh,
            &spec,
            DirectionLayout::uniform(q, mesh.elements.len()),
            basis,
            AssemblyOptions { stabilization: stab, strict_singular: false },
        )
        .unwrap();
        let t1 = t.elapsed();
        let mut sys = sys;
        if std::env::var("INTERP").is_ok() {
            sys.solution = sys.disc.interpolate(&|x| sol.value(x).unwrap());
        }
        let e = projected_errors(&sys, &sol, &QuadratureOptions { max_depth: std::env::var("QDEPTH").map(|v| v.parse().unwrap()).unwrap_or(10), ..Default::default() }).unwrap();
        println!(
            "n={n:3} h={:.3e} ndof={:6} H1={:.4e} L2={:.4e} unconv={} {} [{:.2?} solve, {:.2?} total]",
            mesh.h,
            sys.report.ndof,
            e.rel_h1,
            e.rel_l2,
            e.unconverged_elements,
            sys.report.summary(),
            t1,
            t.elapsed()
        );
    }
}
