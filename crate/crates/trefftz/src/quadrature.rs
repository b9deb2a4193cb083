//! Line and polygon quadrature used for boundary data, oracles and error norms.

use crate::geometry::{signed_area, Point};
use crate::scalar::Real;

/// Rule on [-1, 1].
#[derive(Clone, Debug)]
pub struct LineRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = if (x.abs() - 1.0).abs() < 1e-300 {
        0.5 * nf * (nf + 1.0) * x.powi(n as i32 + 1)
    } else {
        nf * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

impl<T: Real> LineRule<T> {
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        for i in 0..(n + 1) / 2 {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self::from_f64(&nodes, &weights)
    }

    /// Gauss–Lobatto rule with `n >= 2` points including both endpoints.
    pub fn gauss_lobatto(n: usize) -> Self {
        assert!(n >= 2);
        let m = n - 1;
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        nodes[0] = -1.0;
        nodes[m] = 1.0;
        let wend = 2.0 / (n as f64 * m as f64);
        weights[0] = wend;
        weights[m] = wend;
        for i in 1..m {
            // interior nodes are roots of P'_m
            let mut x = -(std::f64::consts::PI * i as f64 / m as f64).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(m, x);
                // P''_m from the Legendre ODE
                let d2p = (2.0 * x * dp - (m * (m + 1)) as f64 * p) / (1.0 - x * x);
                let dx = dp / d2p;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (p, _) = legendre_with_derivative(m, x);
            nodes[i] = x;
            weights[i] = 2.0 / (n as f64 * m as f64 * p * p);
        }
        Self::from_f64(&nodes, &weights)
    }

    fn from_f64(nodes: &[f64], weights: &[f64]) -> Self {
        Self {
            nodes: nodes.iter().map(|&x| T::lit(x)).collect(),
            weights: weights.iter().map(|&w| T::lit(w)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto the segment [a, b] (weights include the
    /// length factor).
    pub fn on_segment(&self, a: Point<T>, b: Point<T>) -> Vec<(Point<T>, T)> {
        let half = T::lit(0.5);
        let len = a.dist(b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| {
                let s = (t + T::one()) * half;
                (a + (b - a) * s, w * half * len)
            })
            .collect()
    }
}

/// Composite Gauss–Legendre rule on [a, b] geometrically graded toward the
/// flagged endpoints (ratio 0.15, innermost cell ~3e-12 of the length so
/// its nodes stay distinct from the endpoint in floating point), for
/// integrands with algebraic endpoint singularities. Endpoints are never
/// sampled.
pub fn graded_segment_rule<T: Real>(a: Point<T>, b: Point<T>, n: usize, at_a: bool, at_b: bool) -> Vec<(Point<T>, T)> {
    const RATIO: f64 = 0.15;
    const LEVELS: i32 = 14;
    let base = LineRule::<T>::gauss_legendre(n);
    // breakpoints in [0, 1] graded toward 0
    let graded = || {
        let mut cuts: Vec<f64> = (0..=LEVELS).rev().map(|j| RATIO.powi(j)).collect();
        cuts.insert(0, 0.0);
        cuts
    };
    let cuts: Vec<f64> = match (at_a, at_b) {
        (false, false) => vec![0.0, 1.0],
        (true, false) => graded(),
        (false, true) => graded().into_iter().rev().map(|t| 1.0 - t).collect(),
        (true, true) => {
            let mut left: Vec<f64> = graded().into_iter().map(|t| 0.5 * t).collect();
            let right: Vec<f64> = graded().into_iter().rev().map(|t| 1.0 - 0.5 * t).skip(1).collect();
            left.extend(right);
            left
        }
    };
    let mut out = Vec::with_capacity(n * cuts.len());
    for w in cuts.windows(2) {
        let (s0, s1) = (T::lit(w[0]), T::lit(w[1]));
        out.extend(base.on_segment(a + (b - a) * s0, a + (b - a) * s1));
    }
    out
}

/// Points on the edge for Gauss–Lobatto boundary integrals of oscillatory data.
pub fn lobatto_points_for_edge(k: f64, h_e: f64) -> usize {
    16usize.max((2.0 + k * h_e / 2.0).ceil() as usize)
}

/// Collapsed (Duffy) Gauss product rule on the reference triangle with vertices
/// (0,0), (1,0), (0,1). Exact for polynomials of total degree `2n - 2`.
#[derive(Clone, Debug)]
pub struct TriangleRule<T> {
    pub points: Vec<(T, T)>,
    pub weights: Vec<T>,
}

impl<T: Real> TriangleRule<T> {
    pub fn collapsed(n: usize) -> Self {
        let g = LineRule::<f64>::gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for i in 0..n {
            let u = 0.5 * (g.nodes[i] + 1.0);
            for j in 0..n {
                let v = 0.5 * (g.nodes[j] + 1.0);
                points.push((T::lit(u), T::lit(v * (1.0 - u))));
                weights.push(T::lit(0.25 * g.weights[i] * g.weights[j] * (1.0 - u)));
            }
        }
        Self { points, weights }
    }

    /// Rule of polynomial degree at least 20.
    pub fn degree20() -> Self {
        Self::collapsed(11)
    }

    pub fn on_triangle(&self, tri: [Point<T>; 3], out: &mut Vec<(Point<T>, T)>) {
        let [a, b, c] = tri;
        let jac = (b - a).cross(c - a).abs();
        for (&(u, v), &w) in self.points.iter().zip(&self.weights) {
            out.push((a + (b - a) * u + (c - a) * v, w * jac));
        }
    }
}

/// Splits a simple counterclockwise polygon into triangles: a fan from the
/// area centroid when every fan triangle is positively oriented, otherwise
/// ear clipping.
pub fn triangulate<T: Real>(pts: &[Point<T>], centroid: Point<T>) -> Vec<[Point<T>; 3]> {
    let n = pts.len();
    let area = signed_area(pts);
    let tol = area * T::lit(1e-12);
    let fan_ok = (0..n).all(|i| (pts[i] - centroid).cross(pts[(i + 1) % n] - centroid) > tol);
    if fan_ok {
        return (0..n).map(|i| [centroid, pts[i], pts[(i + 1) % n]]).collect();
    }
    ear_clip(pts)
}

/// Ear clipping for simple counterclockwise polygons; collinear vertices are
/// allowed.
pub fn ear_clip<T: Real>(pts: &[Point<T>]) -> Vec<[Point<T>; 3]> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    let mut tris = Vec::with_capacity(pts.len().saturating_sub(2));
    let scale = signed_area(pts).abs();
    let eps = scale * T::lit(1e-14);
    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        for i in 0..m {
            let ia = idx[(i + m - 1) % m];
            let ib = idx[i];
            let ic = idx[(i + 1) % m];
            let (a, b, c) = (pts[ia], pts[ib], pts[ic]);
            let turn = (b - a).cross(c - b);
            if turn <= eps {
                continue;
            }
            let blocked = idx.iter().any(|&j| {
                if j == ia || j == ib || j == ic {
                    return false;
                }
                let p = pts[j];
                (b - a).cross(p - a) >= -eps && (c - b).cross(p - b) >= -eps && (a - c).cross(p - c) >= -eps
            });
            if blocked {
                continue;
            }
            tris.push([a, b, c]);
            idx.remove(i);
            clipped = true;
            break;
        }
        if !clipped {
            // only degenerate (collinear) vertices remain; drop one
            let i = (0..idx.len())
                .find(|&i| {
                    let m = idx.len();
                    let a = pts[idx[(i + m - 1) % m]];
                    let b = pts[idx[i]];
                    let c = pts[idx[(i + 1) % m]];
                    (b - a).cross(c - b).abs() <= eps
                })
                .unwrap_or(0);
            idx.remove(i);
        }
    }
    if idx.len() == 3 {
        let (a, b, c) = (pts[idx[0]], pts[idx[1]], pts[idx[2]]);
        if (b - a).cross(c - a) > eps {
            tris.push([a, b, c]);
        }
    }
    tris
}

/// Splits each triangle into four congruent children `level` times.
pub fn refine_triangles<T: Real>(tris: &[[Point<T>; 3]], level: usize) -> Vec<[Point<T>; 3]> {
    let mut cur = tris.to_vec();
    for _ in 0..level {
        let mut next = Vec::with_capacity(cur.len() * 4);
        for &[a, b, c] in &cur {
            let ab = a.midpoint(b);
            let bc = b.midpoint(c);
            let ca = c.midpoint(a);
            next.push([a, ab, ca]);
            next.push([ab, b, bc]);
            next.push([ca, bc, c]);
            next.push([ab, bc, ca]);
        }
        cur = next;
    }
    cur
}

/// Quadrature points covering a set of triangles.
pub fn triangles_rule<T: Real>(tris: &[[Point<T>; 3]], rule: &TriangleRule<T>) -> Vec<(Point<T>, T)> {
    let mut out = Vec::with_capacity(tris.len() * rule.weights.len());
    for &t in tris {
        rule.on_triangle(t, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono_exact(a: usize, b: usize) -> f64 {
        // integral of x^a y^b over the reference triangle = a! b! / (a+b+2)!
        let f = |n: usize| (1..=n).map(|i| i as f64).product::<f64>();
        f(a) * f(b) / f(a + b + 2)
    }

    #[test]
    fn graded_rule_endpoint_singularity() {
        let a = Point::<f64>::new(0.0, 0.0);
        let b = Point::<f64>::new(2.0, 0.0);
        // ∫_0^2 x^{-1/3} dx = 1.5 · 2^{2/3}
        let r = graded_segment_rule(a, b, 12, true, false);
        let v: f64 = r.iter().map(|(x, w)| w * x.x.powf(-1.0 / 3.0)).sum();
        // the innermost cell (width ~6e-12) limits accuracy to ~ε^{2/3}
        assert!((v - 1.5 * 2f64.powf(2.0 / 3.0)).abs() < 5e-9, "{v}");
        let r = graded_segment_rule(a, b, 12, true, true);
        let v: f64 = r.iter().map(|(x, w)| w * (x.x * (2.0 - x.x)).powf(-0.25)).sum();
        // ∫_0^2 (x(2−x))^{-1/4} dx = B(3/4, 3/4) · 2^{1/2}
        let beta = libm::tgamma(0.75).powi(2) / libm::tgamma(1.5);
        assert!((v - beta * 2f64.sqrt()).abs() < 5e-9, "{v}");
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let r = LineRule::<f64>::gauss_legendre(10);
        for deg in 0..20 {
            let s: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((s - exact).abs() < 1e-14, "deg {deg}: {s} vs {exact}");
        }
    }

    #[test]
    fn gauss_lobatto_integrates_polynomials() {
        for n in [2usize, 3, 7, 16, 40] {
            let r = LineRule::<f64>::gauss_lobatto(n);
            assert_eq!(r.nodes[0], -1.0);
            assert_eq!(r.nodes[n - 1], 1.0);
            for deg in 0..(2 * n - 2) {
                let s: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((s - exact).abs() < 1e-13, "n {n} deg {deg}: {s} vs {exact}");
            }
        }
    }

    #[test]
    fn lobatto_order_rule() {
        assert_eq!(lobatto_points_for_edge(20.0, 0.125), 16);
        assert_eq!(lobatto_points_for_edge(40.0, 3.0), 62);
    }

    #[test]
    fn triangle_rule_degree_twenty() {
        let r = TriangleRule::<f64>::degree20();
        for a in 0..=20 {
            for b in 0..=(20 - a) {
                let s: f64 = r
                    .points
                    .iter()
                    .zip(&r.weights)
                    .map(|(&(x, y), w)| w * x.powi(a as i32) * y.powi(b as i32))
                    .sum();
                let e = mono_exact(a, b);
                assert!((s - e).abs() <= 1e-14 * e.max(1e-3), "{a},{b}: {s} vs {e}");
            }
        }
    }

    #[test]
    fn ear_clipping_covers_comb() {
        let raw = [
            (0.0, 0.0), (1.0, 0.0), (1.0, 0.2), (0.8, 0.2), (0.8, 0.8), (0.6, 0.8),
            (0.6, 0.2), (0.3, 0.2), (0.3, 0.8), (0.1, 0.8), (0.1, 0.2), (0.0, 0.2),
        ];
        let pts: Vec<Point<f64>> = raw.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let tris = ear_clip(&pts);
        assert_eq!(tris.len(), pts.len() - 2);
        let a: f64 = tris.iter().map(|t| signed_area(&t[..])).sum();
        assert!((a - signed_area(&pts)).abs() < 1e-14);
        assert!(tris.iter().all(|t| signed_area(&t[..]) > 0.0));
    }
}
