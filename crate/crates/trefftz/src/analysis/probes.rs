use std::f64::consts::PI;

use faer::Side;

use super::AnalysisError;
use crate::assembly::local_g;
use crate::geometry::Point;
use crate::planewave::{edge_mass_matrix, filter_directions, DirectionSet};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionRow {
    pub q: usize,
    pub hk: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// 2-norm condition number λ_max/λ_min.
    pub cond: f64,
}

/// Condition number of the filtered edge mass matrix on [0,0]–[0,h] with
/// 2q+1 equispaced directions, by a full symmetric eigensolve.
pub fn edge_mass_condition<T: Real>(q: usize, h: T, k: T) -> Result<ConditionRow, AnalysisError> {
    let a = Point::origin();
    let b = Point::new(T::zero(), h);
    let dirs = DirectionSet::<T>::equispaced(q);
    let ft = filter_directions(b - a, &dirs.dirs);
    let g = edge_mass_matrix(a, b, &ft.basis_dirs, k);
    let ev = g
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| AnalysisError::Eigen(format!("{e:?}")))?;
    let lmin = ev.iter().fold(f64::INFINITY, |m, v| m.min(v.abs().to_f64_lossy()));
    let lmax = ev.iter().fold(0.0f64, |m, v| m.max(v.abs().to_f64_lossy()));
    Ok(ConditionRow { q, hk: (h * k).to_f64_lossy(), lambda_min: lmin, lambda_max: lmax, cond: lmax / lmin })
}

/// Table of edge mass condition numbers over `hk` for each q (k fixed).
pub fn condition_probe<T: Real>(k: T, qs: &[usize], hk: &[f64]) -> Result<Vec<ConditionRow>, AnalysisError> {
    let mut out = Vec::with_capacity(qs.len() * hk.len());
    for &q in qs {
        for &t in hk {
            out.push(edge_mass_condition(q, T::lit(t) / k, k)?);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenRow {
    pub k: f64,
    pub min_abs_eig: f64,
}

/// k = √ν_{m,n} = π√(m²+n²), the Neumann resonances of (0,1)².
pub fn neumann_eigenvalue_k(m: usize, n: usize) -> f64 {
    PI * ((m * m + n * n) as f64).sqrt()
}

/// Smallest |eigenvalue| of the local Hermitian matrix a(w_ℓ, w_j) on the
/// unit square for each k.
pub fn neumann_eig_probe<T: Real>(q: usize, ks: &[f64]) -> Result<Vec<EigenRow>, AnalysisError> {
    let pts: Vec<Point<T>> = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
        .iter()
        .map(|&(x, y)| Point::new(T::lit(x), T::lit(y)))
        .collect();
    let c = Point::new(T::lit(0.5), T::lit(0.5));
    let dirs = DirectionSet::<T>::equispaced(q);
    ks.iter()
        .map(|&k| {
            let g = local_g(&pts, c, &dirs.dirs, T::lit(k));
            let ev = g
                .self_adjoint_eigenvalues(Side::Lower)
                .map_err(|e| AnalysisError::Eigen(format!("{e:?}")))?;
            let m = ev.iter().fold(f64::INFINITY, |m, v| m.min(v.abs().to_f64_lossy()));
            Ok(EigenRow { k, min_abs_eig: m })
        })
        .collect()
}
