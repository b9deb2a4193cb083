use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use rayon::prelude::*;

use super::{
    boundary::{dirichlet_values, edge_data_integrals, edge_load_vector, robin_matrix},
    local::{near_singular, LocalElementMatrices, NearSingular},
    AssemblyError, AssemblyOptions, BasisKind, BoundaryCondition, DirectionLayout, Discretization, ProblemSpec,
};
use crate::geometry::Point;
use crate::mesh::PolygonalMesh;
use crate::scalar::{cone, czero, Real, C};

/// Residual above which a solve is reported as inaccurate.
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Default)]
pub struct SolveReport {
    pub ndof: usize,
    /// ‖(A+R)u − f‖ / ‖f‖.
    pub residual: f64,
    pub max_edge_cond: f64,
    pub near_singular: Vec<NearSingular>,
}

impl SolveReport {
    pub fn residual_ok(&self) -> bool {
        self.residual.is_finite() && self.residual <= RESIDUAL_TOL
    }

    /// One-line summary for run logs.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "ndof={} residual={:.3e} max_edge_cond={:.3e} near_singular_elements={}",
            self.ndof,
            self.residual,
            self.max_edge_cond,
            self.near_singular.len()
        );
        if let Some(worst) = self
            .near_singular
            .iter()
            .min_by(|a, b| a.ratio.partial_cmp(&b.ratio).unwrap_or(std::cmp::Ordering::Equal))
        {
            s.push_str(&format!(" worst: {worst}"));
        }
        s
    }
}

/// Assembled and solved system together with per-element projector data.
pub struct GlobalSystem<'m, T> {
    pub disc: Discretization<'m, T>,
    pub matrix: SparseColMat<usize, C<T>>,
    pub rhs: Vec<C<T>>,
    pub solution: Vec<C<T>>,
    /// Dirichlet DOF flags.
    pub dirichlet: Vec<bool>,
    /// Π* per element.
    pub pi_star: Vec<Mat<C<T>>>,
    pub report: SolveReport,
}

impl<T: Real> GlobalSystem<'_, T> {
    /// Plane-wave coefficients Π*·u_loc of element `k` for a global vector.
    pub fn element_coefficients(&self, k: usize, u: &[C<T>]) -> Vec<C<T>> {
        let dofs = self.disc.element_dofs(k);
        let ps = &self.pi_star[k];
        (0..ps.nrows())
            .map(|r| dofs.iter().enumerate().fold(czero::<T>(), |acc, (c, &g)| acc + ps[(r, c)] * u[g]))
            .collect()
    }

    /// Coefficients of the discrete solution on every element.
    pub fn solution_coefficients(&self) -> Vec<Vec<C<T>>> {
        (0..self.pi_star.len()).map(|k| self.element_coefficients(k, &self.solution)).collect()
    }

    pub fn matvec(&self, x: &[C<T>]) -> Vec<C<T>> {
        sparse_matvec(&self.matrix, x)
    }
}

impl<T: Real> Discretization<'_, T> {
    /// DOF vector of a function given pointwise: (1/h_e) ∫ u conj(ŵ_ℓ).
    pub fn interpolate(&self, u: &dyn Fn(Point<T>) -> C<T>) -> Vec<C<T>> {
        let mut out = vec![czero::<T>(); self.ndof()];
        for (e, data) in self.edges.iter().enumerate() {
            let (a, b) = self.mesh.edge_endpoints(e);
            let graw = edge_data_integrals(a, b, &data.raw_dirs, self.k, u, None, &[]);
            let vals = dirichlet_values(data, a.dist(b), &graw);
            out[self.offsets[e]..self.offsets[e + 1]].copy_from_slice(&vals);
        }
        out
    }
}

fn sparse_matvec<T: Real>(m: &SparseColMat<usize, C<T>>, x: &[C<T>]) -> Vec<C<T>> {
    let r = m.as_ref();
    let cp = r.symbolic().col_ptr();
    let ri = r.symbolic().row_idx();
    let v = r.val();
    let mut y = vec![czero::<T>(); r.nrows()];
    for j in 0..r.ncols() {
        for idx in cp[j]..cp[j + 1] {
            y[ri[idx]] = y[ri[idx]] + v[idx] * x[j];
        }
    }
    y
}

fn norm<T: Real>(v: &[C<T>]) -> f64 {
    v.iter().map(|z| z.norm_sqr().to_f64_lossy()).sum::<f64>().sqrt()
}

/// Assembles A + R and f, imposes Dirichlet rows and solves by sparse LU.
pub fn assemble_and_solve<'m, T: Real>(
    mesh: &'m PolygonalMesh<T>,
    spec: &ProblemSpec<T>,
    layout: DirectionLayout<T>,
    basis: BasisKind<T>,
    opts: AssemblyOptions,
) -> Result<GlobalSystem<'m, T>, AssemblyError> {
    let disc = Discretization::new(mesh, layout, basis, spec.k)?;
    let n = disc.ndof();

    let locals: Vec<(Vec<usize>, LocalElementMatrices<T>, Option<NearSingular>)> = (0..mesh.elements.len())
        .into_par_iter()
        .map(|k| {
            let lm = LocalElementMatrices::compute(&disc, k, opts.stabilization);
            let diag = near_singular(&lm.g, &mesh.element_points(k), spec.k, k);
            (disc.element_dofs(k), lm, diag)
        })
        .collect();

    let mut near = Vec::new();
    for (_, _, d) in &locals {
        if let Some(d) = d {
            if opts.strict_singular {
                return Err(AssemblyError::NearSingularElement(d.clone()));
            }
            near.push(d.clone());
        }
    }

    let mut rhs = vec![czero::<T>(); n];
    let mut dirichlet = vec![false; n];
    let mut dvals = vec![czero::<T>(); n];
    let mut trip: Vec<Triplet<usize, usize, C<T>>> = Vec::new();
    for (dofs, lm, _) in &locals {
        for (c, &gc) in dofs.iter().enumerate() {
            for (r, &gr) in dofs.iter().enumerate() {
                trip.push(Triplet::new(gr, gc, lm.a[(r, c)]));
            }
        }
    }

    // boundary edges, processed in edge order
    let boundary: Vec<usize> = mesh.boundary_edges().collect();
    let contributions: Vec<_> = boundary
        .par_iter()
        .map(|&e| {
            let edge = &mesh.edges[e];
            let data = &disc.edges[e];
            let bc = spec.condition(edge.label.expect("boundary edges are labelled"));
            let (a, b) = mesh.edge_endpoints(e);
            let h = edge.length;
            let normal = edge.normal;
            let g = spec.datum(bc).clone();
            let sing = &spec.singular_points;
            let gfun = move |x: Point<T>| g(x, normal);
            let graw = edge_data_integrals(a, b, &data.raw_dirs, spec.k, &gfun, None, sing);
            match bc {
                BoundaryCondition::Dirichlet => (e, bc, None, dirichlet_values(data, h, &graw)),
                BoundaryCondition::Neumann => (e, bc, None, edge_load_vector(data, h, &graw)),
                BoundaryCondition::Robin => {
                    let r = robin_matrix(data, h, spec.k, spec.theta);
                    (e, bc, Some(r), edge_load_vector(data, h, &graw))
                }
            }
        })
        .collect();
    for (e, bc, r, vals) in contributions {
        let off = disc.offsets[e];
        match bc {
            BoundaryCondition::Dirichlet => {
                for (i, v) in vals.into_iter().enumerate() {
                    dirichlet[off + i] = true;
                    dvals[off + i] = v;
                }
            }
            _ => {
                for (i, v) in vals.into_iter().enumerate() {
                    rhs[off + i] = rhs[off + i] + v;
                }
                if let Some(r) = r {
                    for c in 0..r.ncols() {
                        for rr in 0..r.nrows() {
                            trip.push(Triplet::new(off + rr, off + c, r[(rr, c)]));
                        }
                    }
                }
            }
        }
    }
    trip.retain(|t| !dirichlet[t.row]);
    for i in 0..n {
        if dirichlet[i] {
            trip.push(Triplet::new(i, i, cone::<T>()));
            rhs[i] = dvals[i];
        }
    }

    let matrix = SparseColMat::<usize, C<T>>::try_new_from_triplets(n, n, &trip)
        .map_err(|e| AssemblyError::Factorization(format!("{e:?}")))?;
    let lu = matrix.sp_lu().map_err(|e| AssemblyError::Factorization(format!("{e:?}")))?;
    let mut x = Mat::<C<T>>::from_fn(n, 1, |i, _| rhs[i]);
    {
        use faer::linalg::solvers::SolveCore;
        lu.solve_in_place_with_conj(faer::Conj::No, x.as_mut());
    }
    let solution: Vec<C<T>> = (0..n).map(|i| x[(i, 0)]).collect();
    let ax = sparse_matvec(&matrix, &solution);
    let res: Vec<C<T>> = ax.iter().zip(&rhs).map(|(a, b)| *a - *b).collect();
    let fnorm = norm(&rhs);
    let residual = if fnorm > 0.0 { norm(&res) / fnorm } else { norm(&res) };
    let report = SolveReport {
        ndof: n,
        residual,
        max_edge_cond: disc.max_edge_cond().to_f64_lossy(),
        near_singular: near,
    };
    let pi_star = locals.into_iter().map(|(_, lm, _)| lm.pi_star).collect();
    Ok(GlobalSystem { disc, matrix, rhs, solution, dirichlet, pi_star, report })
}
