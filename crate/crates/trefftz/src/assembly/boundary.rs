use faer::Mat;

use super::EdgeData;
use crate::geometry::Point;
use crate::quadrature::{graded_segment_rule, lobatto_points_for_edge, LineRule};
use crate::scalar::{cis, cplx, czero, Real, C};

/// ∫_e g conj(w_r) ds for the raw edge plane waves, by Gauss–Lobatto with
/// `points` nodes (default order rule when `None`). When the datum is not
/// finite at an endpoint a Gauss–Legendre rule graded toward that endpoint
/// is used instead. Points of `singular` lying inside the edge split it,
/// with both halves graded toward the split.
pub fn edge_data_integrals<T: Real>(
    a: Point<T>,
    b: Point<T>,
    raw_dirs: &[Point<T>],
    k: T,
    g: &dyn Fn(Point<T>) -> C<T>,
    points: Option<usize>,
    singular: &[Point<T>],
) -> Vec<C<T>> {
    let h = a.dist(b);
    let n = points.unwrap_or_else(|| lobatto_points_for_edge(k.to_f64_lossy(), h.to_f64_lossy()));
    let xe = a.midpoint(b);
    let finite = |v: &C<T>| v.re.is_finite() && v.im.is_finite();
    let eval = |nodes: Vec<(Point<T>, T)>| {
        let vals: Vec<C<T>> = nodes.iter().map(|&(x, _)| g(x)).collect();
        (nodes, vals)
    };
    let split = singular.iter().copied().find(|&s| interior_point(a, b, s));
    let (mut nodes, mut vals) = match split {
        Some(s) => {
            let mut r = graded_segment_rule(a, s, n, false, true);
            r.extend(graded_segment_rule(s, b, n, true, false));
            eval(r)
        }
        None => eval(LineRule::gauss_lobatto(n).on_segment(a, b)),
    };
    if split.is_none() && !vals.iter().all(finite) {
        let (sa, sb) = (!finite(&vals[0]), !finite(&vals[vals.len() - 1]));
        (nodes, vals) = eval(graded_segment_rule(a, b, n, sa, sb));
    }
    // on short edges the innermost graded nodes can round onto the singular
    // point itself; their weights are negligible, so they are dropped
    for v in vals.iter_mut().filter(|v| !finite(v)) {
        *v = czero();
    }
    raw_dirs
        .iter()
        .map(|&d| {
            nodes.iter().zip(&vals).fold(czero::<T>(), |acc, (&(x, w), &v)| {
                acc + v * cis(-k * d.dot(x - xe)) * w
            })
        })
        .collect()
}

/// Whether `s` lies on the open segment (a, b).
fn interior_point<T: Real>(a: Point<T>, b: Point<T>, s: Point<T>) -> bool {
    let ab = b - a;
    let h2 = ab.dot(ab);
    let t = (s - a).dot(ab) / h2;
    let off = (s - a) - ab * t;
    let tol = T::lit(1e-12);
    off.dot(off) <= tol * tol * h2 && t > tol && t < T::one() - tol
}

fn combine<T: Real>(edge: &EdgeData<T>, graw: &[C<T>]) -> Vec<C<T>> {
    (0..edge.dim())
        .map(|l| {
            graw.iter()
                .enumerate()
                .fold(czero::<T>(), |acc, (r, &v)| acc + v * edge.combo[(r, l)])
        })
        .collect()
}

/// Neumann/Robin load on one edge: f = h Ĝ₀⁻¹ Mᵀ g_raw.
pub fn edge_load_vector<T: Real>(edge: &EdgeData<T>, h: T, graw: &[C<T>]) -> Vec<C<T>> {
    let ghat = combine(edge, graw);
    let inv = edge.gram_inv.as_ref().expect("load vectors live on boundary edges");
    (0..edge.dim())
        .map(|i| {
            ghat.iter()
                .enumerate()
                .fold(czero::<T>(), |acc, (j, &v)| acc + v * inv[(i, j)])
                * h
        })
        .collect()
}

/// Dirichlet DOF values (1/h) ∫ g_D conj(ŵ_j).
pub fn dirichlet_values<T: Real>(edge: &EdgeData<T>, h: T, graw: &[C<T>]) -> Vec<C<T>> {
    combine(edge, graw).into_iter().map(|v| v / h).collect()
}

/// Rᵉ = ikθ h² Ĝ₀⁻¹ (row = test function).
pub fn robin_matrix<T: Real>(edge: &EdgeData<T>, h: T, k: T, theta: T) -> Mat<C<T>> {
    let inv = edge.gram_inv.as_ref().expect("Robin matrices live on boundary edges");
    let f = cplx(T::zero(), k * theta * h * h);
    Mat::<C<T>>::from_fn(inv.nrows(), inv.ncols(), |i, j| f * inv[(i, j)])
}
