use std::collections::BTreeMap;

use super::{BoundaryLabel, MeshError, PolygonalMesh};
use crate::geometry::Point;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GradedMeshSpec<T> {
    pub levels: usize,
    pub mu: T,
    pub singular_point: Point<T>,
}

impl<T: Real> GradedMeshSpec<T> {
    pub fn new(levels: usize, mu: T) -> Self {
        Self { levels, mu, singular_point: Point::new(T::zero(), T::lit(0.5)) }
    }
}

#[derive(Clone, Debug)]
pub struct GradedMesh<T> {
    pub mesh: PolygonalMesh<T>,
    /// Layer index ℓ of each element (0 touches the singular point).
    pub layer: Vec<usize>,
    /// Effective degree q_K = ℓ + 1.
    pub degree: Vec<usize>,
}

/// Unit square graded toward (0, 0.5). The square [0,s]×[0.5−s/2, 0.5+s/2]
/// touching the singular point is split at x = μs and y = 0.5 ± μs/2 into six
/// rectangles, `levels` times. Hanging nodes become polygon vertices; all
/// boundary edges are labelled Robin.
pub fn build_graded_mesh<T: Real>(spec: GradedMeshSpec<T>) -> Result<GradedMesh<T>, MeshError> {
    let half = T::lit(0.5);
    let tol = T::lit(1e-14);
    if (spec.singular_point.x).abs() > tol || (spec.singular_point.y - half).abs() > tol {
        return Err(MeshError::Invalid("graded meshes only grade toward (0, 0.5)".into()));
    }
    if !(spec.mu > T::zero() && spec.mu < T::one()) {
        return Err(MeshError::Invalid("grading parameter must lie in (0, 1)".into()));
    }
    let n = spec.levels;
    // rectangles as (x0, y0, x1, y1, layer)
    let mut rects: Vec<([T; 4], usize)> = Vec::new();
    let mut s = T::one();
    for g in 1..=n {
        let ms = spec.mu * s;
        let ylo = half - s * half;
        let yhi = half + s * half;
        let ymlo = half - ms * half;
        let ymhi = half + ms * half;
        let layer = n - g + 1;
        rects.push(([T::zero(), ylo, ms, ymlo], layer));
        rects.push(([ms, ylo, s, ymlo], layer));
        rects.push(([ms, ymlo, s, ymhi], layer));
        rects.push(([ms, ymhi, s, yhi], layer));
        rects.push(([T::zero(), ymhi, ms, yhi], layer));
        s = ms;
    }
    rects.push(([T::zero(), half - s * half, s, half + s * half], 0));

    // shared vertex pool keyed on rounded coordinates
    let key = |p: Point<T>| {
        let r = |v: T| (v.to_f64_lossy() * 1e12).round() as i64;
        (r(p.x), r(p.y))
    };
    let mut pool: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let mut vertices: Vec<Point<T>> = Vec::new();
    for (r, _) in &rects {
        for p in [
            Point::new(r[0], r[1]),
            Point::new(r[2], r[1]),
            Point::new(r[2], r[3]),
            Point::new(r[0], r[3]),
        ] {
            pool.entry(key(p)).or_insert_with(|| {
                vertices.push(p);
                vertices.len() - 1
            });
        }
    }
    let on_segment = |p: Point<T>, a: Point<T>, b: Point<T>| {
        let len = a.dist(b);
        let t = (p - a).dot(b - a) / (len * len);
        (b - a).cross(p - a).abs() <= tol * len && t > tol && t < T::one() - tol
    };
    let mut polys = Vec::with_capacity(rects.len());
    for (r, _) in &rects {
        let corners = [
            Point::new(r[0], r[1]),
            Point::new(r[2], r[1]),
            Point::new(r[2], r[3]),
            Point::new(r[0], r[3]),
        ];
        let mut poly = Vec::new();
        for c in 0..4 {
            let a = corners[c];
            let b = corners[(c + 1) % 4];
            poly.push(pool[&key(a)]);
            let mut inner: Vec<(T, usize)> = vertices
                .iter()
                .enumerate()
                .filter(|(_, &p)| on_segment(p, a, b))
                .map(|(i, &p)| (p.dist(a), i))
                .collect();
            inner.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite"));
            poly.extend(inner.into_iter().map(|(_, i)| i));
        }
        polys.push(poly);
    }
    // boundary edges: those used once
    let mut count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for poly in &polys {
        for i in 0..poly.len() {
            let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
            *count.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    let labels = count
        .into_iter()
        .filter(|&(_, c)| c == 1)
        .map(|(k, _)| (k, BoundaryLabel::Robin))
        .collect();
    let layer: Vec<usize> = rects.iter().map(|r| r.1).collect();
    let degree = layer.iter().map(|l| l + 1).collect();
    let mesh = PolygonalMesh::from_parts(vertices, polys, &labels)?;
    Ok(GradedMesh { mesh, layer, degree })
}
