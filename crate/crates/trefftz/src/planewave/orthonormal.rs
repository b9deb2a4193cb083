use faer::{Mat, MatRef, Side};

use super::PlaneWaveError;
use crate::scalar::Real;

/// Options of the eigenvalue-based edge basis reduction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrthoOptions<T> {
    /// Eigenvalues with |λ| below this are discarded.
    pub sigma: T,
    /// Compare λ/h_e instead of λ with `sigma`.
    pub relative: bool,
    /// Scale the retained eigenvectors by 1/√λ. Off by default: the plain
    /// eigenvectors (ŵ orthogonal with ‖ŵ_ℓ‖² = λ_ℓ) reproduce the
    /// published error tables.
    pub scaled: bool,
}

impl<T: Real> Default for OrthoOptions<T> {
    fn default() -> Self {
        Self { sigma: T::lit(1e-13), relative: false, scaled: false }
    }
}

/// Reduced edge basis ŵ_ℓ = Σ_r Q_{r,ℓ} w_r.
#[derive(Clone, Debug)]
pub struct OrthonormalEdgeBasis<T> {
    /// p × p̂ combination matrix.
    pub q: Mat<T>,
    /// Retained eigenvalues, descending.
    pub lambda: Vec<T>,
    /// Diagonal of the Gram matrix of the new basis (ones when scaled).
    pub gram_diag: Vec<T>,
    /// Trace coefficients C (p × p̂): w_j = Σ_ℓ C_{j,ℓ} ŵ_ℓ on the span kept.
    pub coeff: Mat<T>,
    pub sigma: T,
    pub scaled: bool,
}

impl<T: Real> OrthonormalEdgeBasis<T> {
    pub fn dim(&self) -> usize {
        self.lambda.len()
    }
}

/// Symmetric eigendecomposition of the edge mass matrix, dropping eigenpairs
/// below the tolerance.
pub fn orthonormalize_edge_basis<T: Real>(
    g0: MatRef<'_, T>,
    h_e: T,
    opts: OrthoOptions<T>,
) -> Result<OrthonormalEdgeBasis<T>, PlaneWaveError> {
    let p = g0.nrows();
    let eig = g0.self_adjoint_eigen(Side::Lower).map_err(|_| PlaneWaveError::Eigen)?;
    let s = eig.S();
    let u = eig.U();
    let norm = if opts.relative { h_e } else { T::one() };
    // eigenvalues come ascending; keep descending order
    let keep: Vec<usize> = (0..p).rev().filter(|&i| (s[i] / norm).abs() >= opts.sigma).collect();
    if keep.is_empty() {
        let largest = (0..p).map(|i| s[i].abs()).fold(T::zero(), T::max);
        return Err(PlaneWaveError::DegenerateEdge {
            sigma: opts.sigma.to_f64_lossy(),
            largest: largest.to_f64_lossy(),
        });
    }
    let lambda: Vec<T> = keep.iter().map(|&i| s[i]).collect();
    let m = keep.len();
    let mut q = Mat::<T>::zeros(p, m);
    let mut coeff = Mat::<T>::zeros(p, m);
    for (c, &i) in keep.iter().enumerate() {
        let lam = s[i];
        let (fq, fc) = if opts.scaled {
            let r = lam.abs().sqrt();
            (T::one() / r, r)
        } else {
            (T::one(), T::one())
        };
        for r in 0..p {
            q[(r, c)] = u[(r, i)] * fq;
            coeff[(r, c)] = u[(r, i)] * fc;
        }
    }
    let gram_diag = if opts.scaled { vec![T::one(); m] } else { lambda.clone() };
    Ok(OrthonormalEdgeBasis { q, lambda, gram_diag, coeff, sigma: opts.sigma, scaled: opts.scaled })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::planewave::{edge_mass_matrix, DirectionSet};

    #[test]
    fn diagonal_input() {
        let h = 0.25;
        let g = Mat::<f64>::from_fn(5, 5, |i, j| if i == j { h } else { 0.0 });
        let b = orthonormalize_edge_basis(g.as_ref(), h, OrthoOptions { scaled: true, ..OrthoOptions::default() }).unwrap();
        assert_eq!(b.dim(), 5);
        for c in 0..5 {
            let col_norm: f64 = (0..5).map(|r| b.q[(r, c)] * b.q[(r, c)]).sum::<f64>().sqrt();
            assert!((col_norm - 1.0 / h.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn one_duplicated_trace_drops_one() {
        let a = Point::new(0.0, 0.0);
        let b = Point::new(1.0, 0.0);
        let dirs = [Point::new(1.0, 0.0), Point::new(0.6, 0.8), Point::new(0.6, -0.8)];
        let g = edge_mass_matrix(a, b, &dirs, 3.0);
        let o = orthonormalize_edge_basis(g.as_ref(), 1.0, OrthoOptions::default()).unwrap();
        assert_eq!(o.dim(), 2);
    }

    #[test]
    fn all_small_is_an_error() {
        let g = Mat::<f64>::from_fn(2, 2, |_, _| 1e-15);
        let r = orthonormalize_edge_basis(g.as_ref(), 1.0, OrthoOptions::default());
        assert!(matches!(r, Err(PlaneWaveError::DegenerateEdge { .. })));
    }

    #[test]
    fn looser_sigma_keeps_more() {
        let d = DirectionSet::<f64>::equispaced(7);
        let a = Point::new(0.0, 0.0);
        let b = Point::new(0.1, 0.07);
        let g = edge_mass_matrix(a, b, &d.dirs, 10.0);
        let h = a.dist(b);
        let strict = orthonormalize_edge_basis(g.as_ref(), h, OrthoOptions::default()).unwrap();
        let loose = OrthoOptions { sigma: 10.0 * f64::EPSILON, ..OrthoOptions::default() };
        let loose = orthonormalize_edge_basis(g.as_ref(), h, loose).unwrap();
        assert!(loose.dim() >= strict.dim());
    }
}
