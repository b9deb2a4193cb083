use std::collections::BTreeMap;

use super::{BoundaryLabel, PolygonalMesh};
use crate::geometry::Point;
use crate::scalar::Real;

/// Axis-aligned rectangle [x0, x1] × [y0, y1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect<T> {
    pub x0: T,
    pub y0: T,
    pub x1: T,
    pub y1: T,
}

impl<T: Real> Rect<T> {
    pub fn unit() -> Self {
        Self { x0: T::zero(), y0: T::zero(), x1: T::one(), y1: T::one() }
    }
}

/// Labels of the four sides of a rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SideLabels {
    pub left: BoundaryLabel,
    pub right: BoundaryLabel,
    pub bottom: BoundaryLabel,
    pub top: BoundaryLabel,
}

impl SideLabels {
    pub fn uniform(l: BoundaryLabel) -> Self {
        Self { left: l, right: l, bottom: l, top: l }
    }
}

/// n × n congruent squares (rectangles) on `rect`.
pub fn build_cartesian_mesh<T: Real>(n: usize, rect: Rect<T>, sides: SideLabels) -> PolygonalMesh<T> {
    assert!(n >= 1, "need at least one cell per side");
    assert!(rect.x1 > rect.x0 && rect.y1 > rect.y0, "degenerate rectangle");
    let nf = T::lit(n as f64);
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            let x = rect.x0 + (rect.x1 - rect.x0) * T::lit(i as f64) / nf;
            let y = rect.y0 + (rect.y1 - rect.y0) * T::lit(j as f64) / nf;
            vertices.push(Point::new(x, y));
        }
    }
    let mut polys = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            polys.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let mut labels = BTreeMap::new();
    for s in 0..n {
        let mut put = |a: usize, b: usize, l| {
            labels.insert((a.min(b), a.max(b)), l);
        };
        put(id(s, 0), id(s + 1, 0), sides.bottom);
        put(id(s, n), id(s + 1, n), sides.top);
        put(id(0, s), id(0, s + 1), sides.left);
        put(id(n, s), id(n, s + 1), sides.right);
    }
    PolygonalMesh::from_parts(vertices, polys, &labels).expect("cartesian mesh is valid")
}

/// Squares of side 2^-level covering (−1,2)×(0,3) without [0,1]×[1,2]; the
/// inner boundary is labelled `Scatterer`, the outer one `Robin`.
pub fn build_hole_mesh<T: Real>(level: usize) -> PolygonalMesh<T> {
    let m = 1usize << level; // cells per unit length
    let n = 3 * m;
    let step = T::one() / T::lit(m as f64);
    let in_hole = |i: usize, j: usize| (m..2 * m).contains(&i) && (m..2 * m).contains(&j);
    let mut used = vec![usize::MAX; (n + 1) * (n + 1)];
    let mut vertices = Vec::new();
    let mut polys = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if in_hole(i, j) {
                continue;
            }
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let mut poly = Vec::with_capacity(4);
            for (a, b) in corners {
                let g = b * (n + 1) + a;
                if used[g] == usize::MAX {
                    used[g] = vertices.len();
                    vertices.push(Point::new(
                        -T::one() + step * T::lit(a as f64),
                        step * T::lit(b as f64),
                    ));
                }
                poly.push(used[g]);
            }
            polys.push(poly);
        }
    }
    let mut labels = BTreeMap::new();
    let vid = |a: usize, b: usize| used[b * (n + 1) + a];
    for s in 0..n {
        for (a, b) in [((s, 0), (s + 1, 0)), ((s, n), (s + 1, n)), ((0, s), (0, s + 1)), ((n, s), (n, s + 1))] {
            let (u, v) = (vid(a.0, a.1), vid(b.0, b.1));
            labels.insert((u.min(v), u.max(v)), BoundaryLabel::Robin);
        }
    }
    for s in m..2 * m {
        for (a, b) in [((s, m), (s + 1, m)), ((s, 2 * m), (s + 1, 2 * m)), ((m, s), (m, s + 1)), ((2 * m, s), (2 * m, s + 1))] {
            let (u, v) = (vid(a.0, a.1), vid(b.0, b.1));
            labels.insert((u.min(v), u.max(v)), BoundaryLabel::Scatterer);
        }
    }
    PolygonalMesh::from_parts(vertices, polys, &labels).expect("hole mesh is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cartesian_counts() {
        let m = build_cartesian_mesh::<f64>(1, Rect::unit(), SideLabels::uniform(BoundaryLabel::Robin));
        assert_eq!((m.elements.len(), m.edges.len()), (1, 4));
        assert!((m.h - 2f64.sqrt()).abs() < 1e-15);
        let m = build_cartesian_mesh::<f64>(2, Rect::unit(), SideLabels::uniform(BoundaryLabel::Robin));
        assert_eq!((m.elements.len(), m.edges.len()), (4, 12));
        assert!((m.total_area() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hole_counts() {
        let m = build_hole_mesh::<f64>(0);
        assert_eq!(m.elements.len(), 8);
        let inner = m.edges.iter().filter(|e| e.label == Some(BoundaryLabel::Scatterer)).count();
        let outer = m.edges.iter().filter(|e| e.label == Some(BoundaryLabel::Robin)).count();
        assert_eq!((inner, outer), (4, 12));
        let m = build_hole_mesh::<f64>(1);
        assert_eq!(m.elements.len(), 32);
        assert!((m.total_area() - 8.0).abs() < 1e-12);
        for l in 0..4 {
            assert_eq!(build_hole_mesh::<f64>(l).elements.len(), 8 * 4usize.pow(l as u32));
        }
    }
}
