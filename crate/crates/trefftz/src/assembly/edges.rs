use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, Side};
use rayon::prelude::*;

use super::{AssemblyError, BasisKind};
use crate::geometry::Point;
use crate::mesh::PolygonalMesh;
use crate::planewave::{
    edge_mass_matrix, filter_directions, orthonormalize_edge_basis, DirectionSet, FilteredTrace,
    OrthonormalEdgeBasis,
};
use crate::scalar::Real;

/// Which plane-wave directions each element uses: a prefix of `master`.
#[derive(Clone, Debug)]
pub struct DirectionLayout<T> {
    pub master: DirectionSet<T>,
    pub element_counts: Vec<usize>,
}

impl<T: Real> DirectionLayout<T> {
    /// Same p = 2q+1 equispaced directions on every element.
    pub fn uniform(q: usize, n_elements: usize) -> Self {
        let master = DirectionSet::equispaced(q);
        let p = master.len();
        Self { master, element_counts: vec![p; n_elements] }
    }

    /// Element degrees q_K with nested reordered directions.
    pub fn hp(degrees: &[usize]) -> Self {
        let q_max = degrees.iter().copied().max().unwrap_or(1);
        Self {
            master: DirectionSet::hp_ordered(q_max),
            element_counts: degrees.iter().map(|q| 2 * q + 1).collect(),
        }
    }

    pub fn element_dirs(&self, k: usize) -> &[Point<T>] {
        self.master.prefix(self.element_counts[k])
    }

    /// Edge directions under the maximum rule.
    pub fn edge_dirs(&self, mesh: &PolygonalMesh<T>, e: usize) -> &[Point<T>] {
        let n = mesh.edges[e].elements.iter().map(|&k| self.element_counts[k]).max().unwrap_or(0);
        self.master.prefix(n)
    }
}

#[derive(Clone, Debug)]
pub enum EdgeBasis<T> {
    Filtered(FilteredTrace<T>),
    Orthonormal(OrthonormalEdgeBasis<T>),
}

/// Edge basis ŵ_ℓ = Σ_r combo[r, ℓ] w_r with w_r = e^{ik raw_dirs[r]·(x − x_e)}.
#[derive(Clone, Debug)]
pub struct EdgeData<T> {
    pub dirs: Vec<Point<T>>,
    pub basis: EdgeBasis<T>,
    pub raw_dirs: Vec<Point<T>>,
    pub combo: Mat<T>,
    /// Gram matrix of the basis, (j, l) = ∫ ŵ_l ŵ_j.
    pub gram: Mat<T>,
    /// Row j: coefficients of the trace of edge direction j in the basis.
    pub trace_coeff: Mat<T>,
    /// 2-norm condition number of `gram`.
    pub cond: T,
    /// Inverse of `gram`, built on boundary edges.
    pub gram_inv: Option<Mat<T>>,
}

impl<T: Real> EdgeData<T> {
    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn build(
        a: Point<T>,
        b: Point<T>,
        dirs: &[Point<T>],
        k: T,
        kind: BasisKind<T>,
        boundary: bool,
    ) -> Result<Self, crate::planewave::PlaneWaveError> {
        let h = a.dist(b);
        let (basis, raw_dirs, combo, gram, trace_coeff) = match kind {
            BasisKind::Filtered => {
                let f = filter_directions(b - a, dirs);
                let m = f.dim();
                let gram = edge_mass_matrix(a, b, &f.basis_dirs, k);
                let mut tc = Mat::<T>::zeros(dirs.len(), m);
                for (j, &t) in f.trace_index.iter().enumerate() {
                    tc[(j, t)] = T::one();
                }
                let raw = f.basis_dirs.clone();
                (EdgeBasis::Filtered(f), raw, Mat::<T>::identity(m, m), gram, tc)
            }
            BasisKind::Orthonormal(opts) => {
                let g0 = edge_mass_matrix(a, b, dirs, k);
                let o = orthonormalize_edge_basis(g0.as_ref(), h, opts)?;
                let m = o.dim();
                let gram = Mat::<T>::from_fn(m, m, |i, j| if i == j { o.gram_diag[i] } else { T::zero() });
                let combo = o.q.clone();
                let tc = o.coeff.clone();
                (EdgeBasis::Orthonormal(o), dirs.to_vec(), combo, gram, tc)
            }
        };
        let ev = gram.self_adjoint_eigenvalues(Side::Lower).map_err(|_| crate::planewave::PlaneWaveError::Eigen)?;
        let lmax = ev.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let lmin = ev.iter().fold(T::infinity(), |m, v| m.min(v.abs()));
        let cond = if lmin > T::zero() { lmax / lmin } else { T::infinity() };
        let gram_inv = boundary.then(|| gram.partial_piv_lu().inverse());
        Ok(Self { dirs: dirs.to_vec(), basis, raw_dirs, combo, gram, trace_coeff, cond, gram_inv })
    }
}

/// Mesh, directions and edge bases with the edge-major DOF numbering.
pub struct Discretization<'m, T> {
    pub mesh: &'m PolygonalMesh<T>,
    pub k: T,
    pub layout: DirectionLayout<T>,
    pub basis_kind: BasisKind<T>,
    pub edges: Vec<EdgeData<T>>,
    /// DOFs of edge e are offsets[e]..offsets[e+1].
    pub offsets: Vec<usize>,
}

impl<'m, T: Real> Discretization<'m, T> {
    pub fn new(
        mesh: &'m PolygonalMesh<T>,
        layout: DirectionLayout<T>,
        basis_kind: BasisKind<T>,
        k: T,
    ) -> Result<Self, AssemblyError> {
        if layout.element_counts.len() != mesh.elements.len() {
            return Err(AssemblyError::Layout { layout: layout.element_counts.len(), mesh: mesh.elements.len() });
        }
        let edges: Vec<EdgeData<T>> = (0..mesh.edges.len())
            .into_par_iter()
            .map(|e| {
                let (a, b) = mesh.edge_endpoints(e);
                let dirs = layout.edge_dirs(mesh, e);
                EdgeData::build(a, b, dirs, k, basis_kind, mesh.edges[e].is_boundary())
                    .map_err(|source| AssemblyError::EdgeBasis { edge: e, source })
            })
            .collect::<Result<_, _>>()?;
        for (e, d) in edges.iter().enumerate() {
            if let Some(inv) = &d.gram_inv {
                let finite = (0..inv.nrows()).all(|i| (0..inv.ncols()).all(|j| inv[(i, j)].is_finite()));
                if !finite {
                    return Err(AssemblyError::SingularEdgeMass { edge: e, cond: d.cond.to_f64_lossy() });
                }
            }
        }
        let mut offsets = Vec::with_capacity(edges.len() + 1);
        offsets.push(0);
        for d in &edges {
            offsets.push(offsets.last().copied().unwrap_or(0) + d.dim());
        }
        Ok(Self { mesh, k, layout, basis_kind, edges, offsets })
    }

    pub fn ndof(&self) -> usize {
        self.offsets.last().copied().unwrap_or(0)
    }

    /// Global DOFs of element `k` in local order (edge by edge).
    pub fn element_dofs(&self, k: usize) -> Vec<usize> {
        self.mesh.elements[k]
            .edges
            .iter()
            .flat_map(|&e| self.offsets[e]..self.offsets[e + 1])
            .collect()
    }

    pub fn max_edge_cond(&self) -> T {
        self.edges.iter().fold(T::zero(), |m, d| m.max(d.cond))
    }
}
