use rayon::prelude::*;

use super::AnalysisError;
use crate::assembly::GlobalSystem;
use crate::geometry::Point;
use crate::problems::{AnalyticSolution, ValueGrad};
use crate::quadrature::{refine_triangles, triangulate, TriangleRule};
use crate::scalar::{cis, cplx, czero, Real, C};

/// A function with gradient that can be sampled pointwise.
pub trait Field<T>: Sync {
    fn eval(&self, x: Point<T>) -> Result<ValueGrad<T>, AnalysisError>;
}

impl<T: Real> Field<T> for AnalyticSolution<T> {
    fn eval(&self, x: Point<T>) -> Result<ValueGrad<T>, AnalysisError> {
        AnalyticSolution::eval(self, x).map_err(|e| AnalysisError::Evaluation {
            x: x.x.to_f64_lossy(),
            y: x.y.to_f64_lossy(),
            msg: e.to_string(),
        })
    }
}

/// Elementwise plane-wave expansion Σ c_ℓ exp(ik d_ℓ·(x − x_K)).
#[derive(Clone, Debug)]
pub struct PiecewisePlaneWaves<T> {
    pub k: T,
    pub centroids: Vec<Point<T>>,
    pub dirs: Vec<Vec<Point<T>>>,
    pub coeffs: Vec<Vec<C<T>>>,
    /// Vertex lists, used for point location.
    pub polygons: Vec<Vec<Point<T>>>,
}

impl<T: Real> PiecewisePlaneWaves<T> {
    /// Π_p u_h of a solved system.
    pub fn from_system(sys: &GlobalSystem<'_, T>) -> Self {
        let mesh = sys.disc.mesh;
        let n = mesh.elements.len();
        Self {
            k: sys.disc.k,
            centroids: mesh.elements.iter().map(|e| e.centroid).collect(),
            dirs: (0..n).map(|i| sys.disc.layout.element_dirs(i).to_vec()).collect(),
            coeffs: sys.solution_coefficients(),
            polygons: (0..n).map(|i| mesh.element_points(i)).collect(),
        }
    }

    pub fn eval_on(&self, element: usize, x: Point<T>) -> ValueGrad<T> {
        let xc = x - self.centroids[element];
        let ik = cplx(T::zero(), self.k);
        let mut v = czero::<T>();
        let mut g = [czero::<T>(); 2];
        for (d, c) in self.dirs[element].iter().zip(&self.coeffs[element]) {
            let w = *c * cis(self.k * d.dot(xc));
            v = v + w;
            g[0] = g[0] + ik * w * d.x;
            g[1] = g[1] + ik * w * d.y;
        }
        (v, g)
    }

    /// Σ_ℓ |c_ℓ| on one element.
    pub fn coeff_mass(&self, element: usize) -> f64 {
        self.coeffs[element].iter().map(|c| c.norm().to_f64_lossy()).sum()
    }

    /// Index of an element containing `x` (closed polygons).
    pub fn locate(&self, x: Point<T>) -> Option<usize> {
        self.polygons.iter().position(|p| contains(p, x))
    }
}

impl<T: Real> Field<T> for PiecewisePlaneWaves<T> {
    fn eval(&self, x: Point<T>) -> Result<ValueGrad<T>, AnalysisError> {
        let e = self.locate(x).ok_or(AnalysisError::Locate { x: x.x.to_f64_lossy(), y: x.y.to_f64_lossy() })?;
        Ok(self.eval_on(e, x))
    }
}

fn contains<T: Real>(poly: &[Point<T>], x: Point<T>) -> bool {
    // winding test, tolerant on edges
    let n = poly.len();
    let scale = poly.iter().fold(T::zero(), |m, p| m.max(p.dist(poly[0])));
    let eps = scale * scale * T::lit(1e-12);
    let mut wn = 0i32;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let c = (b - a).cross(x - a);
        let on_seg = c.abs() <= eps && (x - a).dot(x - b) <= eps;
        if on_seg {
            return true;
        }
        if a.y <= x.y {
            if b.y > x.y && c > T::zero() {
                wn += 1;
            }
        } else if b.y <= x.y && c < T::zero() {
            wn -= 1;
        }
    }
    wn != 0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOptions {
    /// Accepted relative change between a triangle and its four children.
    pub rel_tol: f64,
    pub max_depth: usize,
    /// Extra uniform refinement before adaptivity.
    pub base_level: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-10, max_depth: 10, base_level: 0 }
    }
}

/// Absolute tolerance of one integrated density.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComponentTol {
    /// Added to |I| before applying the relative tolerance.
    pub floor: f64,
    /// Pointwise round-off amplitude η of the function whose square is
    /// integrated; allows 2η√(|I|·area) + η²·area on top.
    pub noise: f64,
}

/// Adaptive integral of a vector of `N` nonnegative densities over a simple
/// polygon. A triangle is accepted once its four children change every
/// component by at most its share (by area) of the tolerance
/// `rel_tol·(|I_c| + floor_c)` plus the round-off allowance, where `I` is
/// the coarse polygon integral. Returns the integrals and whether every
/// triangle met the tolerance.
pub fn integrate_polygon<T: Real, const N: usize>(
    pts: &[Point<T>],
    centroid: Point<T>,
    f: &(dyn Fn(Point<T>) -> Result<[f64; N], AnalysisError> + Sync),
    ctol: [ComponentTol; N],
    opts: &QuadratureOptions,
) -> Result<([f64; N], bool), AnalysisError> {
    let rule = TriangleRule::<T>::degree20();
    let tris = refine_triangles(&triangulate(pts, centroid), opts.base_level);
    let area: f64 = tris.iter().map(|t| tri_area(t)).sum();
    let apply = |t: [Point<T>; 3]| -> Result<[f64; N], AnalysisError> {
        let mut qp = Vec::with_capacity(rule.weights.len());
        rule.on_triangle(t, &mut qp);
        let mut acc = [0.0; N];
        for (x, w) in qp {
            let v = f(x)?;
            let w = w.to_f64_lossy();
            for i in 0..N {
                acc[i] += w * v[i];
            }
        }
        Ok(acc)
    };
    let coarse: Vec<[f64; N]> = tris.iter().map(|&t| apply(t)).collect::<Result<_, _>>()?;
    let mut tol = [0.0; N];
    for i in 0..N {
        let tot: f64 = coarse.iter().map(|c| c[i]).sum();
        let c = ctol[i];
        tol[i] = opts.rel_tol * (tot.abs() + c.floor)
            + 2.0 * c.noise * (tot.abs() * area).sqrt()
            + c.noise * c.noise * area
            + f64::MIN_POSITIVE;
    }

    fn adapt<T: Real, const N: usize>(
        t: [Point<T>; 3],
        parent: [f64; N],
        depth: usize,
        ctx: &(
            &dyn Fn([Point<T>; 3]) -> Result<[f64; N], AnalysisError>,
            [f64; N],
            f64,
            usize,
        ),
    ) -> Result<([f64; N], bool), AnalysisError> {
        let (apply, tol, area, max_depth) = ctx;
        let kids = refine_triangles(&[t], 1);
        let mut vals = Vec::with_capacity(4);
        let mut sum = [0.0; N];
        for &c in &kids {
            let v = apply(c)?;
            for i in 0..N {
                sum[i] += v[i];
            }
            vals.push(v);
        }
        let frac = tri_area(&t) / area;
        if sum.iter().any(|v| !v.is_finite()) {
            return Ok((sum, false));
        }
        if (0..N).all(|i| (sum[i] - parent[i]).abs() <= tol[i] * frac) {
            return Ok((sum, true));
        }
        if depth >= *max_depth {
            return Ok((sum, false));
        }
        let mut out = [0.0; N];
        let mut ok = true;
        for (c, v) in kids.into_iter().zip(vals) {
            let (r, o) = adapt(c, v, depth + 1, ctx)?;
            ok &= o;
            for i in 0..N {
                out[i] += r[i];
            }
        }
        Ok((out, ok))
    }

    let ctx = (&apply as &dyn Fn([Point<T>; 3]) -> Result<[f64; N], AnalysisError>, tol, area, opts.max_depth);
    let mut total = [0.0; N];
    let mut converged = true;
    for (t, c) in tris.into_iter().zip(coarse) {
        let (r, ok) = adapt(t, c, 1, &ctx)?;
        converged &= ok;
        for i in 0..N {
            total[i] += r[i];
        }
    }
    Ok((total, converged))
}

fn tri_area<T: Real>(t: &[Point<T>; 3]) -> f64 {
    0.5 * (t[1] - t[0]).cross(t[2] - t[0]).abs().to_f64_lossy()
}

/// Relative projected errors ‖u − Π_p u_h‖ / ‖u‖ in the k-weighted H¹ norm
/// (|·|₁² + k²‖·‖₀²) and in L².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectedErrors {
    pub rel_h1: f64,
    pub rel_l2: f64,
    pub abs_h1: f64,
    pub abs_l2: f64,
    pub norm_h1: f64,
    pub norm_l2: f64,
    /// Elements whose adaptive quadrature hit the depth limit.
    pub unconverged_elements: usize,
}

impl ProjectedErrors {
    pub fn quadrature_converged(&self) -> bool {
        self.unconverged_elements == 0
    }

    fn from_sums(s: [f64; 4], k: f64, unconverged: usize) -> Self {
        let [e0, e1, u0, u1] = s;
        let abs_h1 = (e1 + k * k * e0).sqrt();
        let abs_l2 = e0.sqrt();
        let norm_h1 = (u1 + k * k * u0).sqrt();
        let norm_l2 = u0.sqrt();
        Self {
            rel_h1: abs_h1 / norm_h1,
            rel_l2: abs_l2 / norm_l2,
            abs_h1,
            abs_l2,
            norm_h1,
            norm_l2,
            unconverged_elements: unconverged,
        }
    }
}

fn densities<T: Real>(u: ValueGrad<T>, uh: ValueGrad<T>) -> [f64; 4] {
    let e0 = (u.0 - uh.0).norm_sqr();
    let e1 = (u.1[0] - uh.1[0]).norm_sqr() + (u.1[1] - uh.1[1]).norm_sqr();
    let u0 = u.0.norm_sqr();
    let u1 = u.1[0].norm_sqr() + u.1[1].norm_sqr();
    [e0.to_f64_lossy(), e1.to_f64_lossy(), u0.to_f64_lossy(), u1.to_f64_lossy()]
}

/// Round-off of a plane-wave sum relative to its coefficients, with margin.
const NOISE_FACTOR: f64 = 100.0 * f64::EPSILON;

fn tolerances<T: Real>(
    pts: &[Point<T>],
    centroid: Point<T>,
    reference: &dyn Fn(Point<T>) -> Result<ValueGrad<T>, AnalysisError>,
    coeff_mass: f64,
    k: f64,
) -> [ComponentTol; 4] {
    // error densities may vanish to round-off; anchor their tolerance to the
    // size of the reference field on the element
    let mut s = [0.0f64; 2];
    for p in pts.iter().copied().chain(std::iter::once(centroid)) {
        let q = centroid + (p - centroid) * T::lit(0.5);
        if let Ok(u) = reference(q) {
            s[0] = s[0].max(u.0.norm_sqr().to_f64_lossy());
            s[1] = s[1].max((u.1[0].norm_sqr() + u.1[1].norm_sqr()).to_f64_lossy());
        }
    }
    let a = crate::geometry::signed_area(pts).abs().to_f64_lossy();
    let eta = NOISE_FACTOR * (coeff_mass + s[0].sqrt());
    let eta_g = NOISE_FACTOR * (k * coeff_mass + s[1].sqrt());
    [
        ComponentTol { floor: 1e-12 * s[0] * a, noise: eta },
        ComponentTol { floor: 1e-12 * s[1] * a, noise: eta_g },
        ComponentTol::default(),
        ComponentTol::default(),
    ]
}

/// Projected errors of a solved system against a field defined on Ω.
pub fn projected_errors<T: Real>(
    sys: &GlobalSystem<'_, T>,
    exact: &dyn Field<T>,
    opts: &QuadratureOptions,
) -> Result<ProjectedErrors, AnalysisError> {
    let uh = PiecewisePlaneWaves::from_system(sys);
    let mesh = sys.disc.mesh;
    let k = sys.disc.k.to_f64_lossy();
    let parts: Vec<([f64; 4], bool)> = (0..mesh.elements.len())
        .into_par_iter()
        .map(|e| {
            let pts = mesh.element_points(e);
            let c = mesh.elements[e].centroid;
            let f = |x: Point<T>| Ok(densities(exact.eval(x)?, uh.eval_on(e, x)));
            let tol = tolerances(&pts, c, &|x| exact.eval(x), uh.coeff_mass(e), k);
            integrate_polygon(&pts, c, &f, tol, opts)
        })
        .collect::<Result<_, _>>()?;
    Ok(reduce(parts, sys.disc.k.to_f64_lossy()))
}

/// Projected errors of `coarse` measured against the projected solution of
/// `reference` on a mesh that refines it. Integration runs over the
/// reference elements, each matched to the coarse element containing its
/// centroid.
pub fn projected_errors_against<T: Real>(
    coarse: &GlobalSystem<'_, T>,
    reference: &GlobalSystem<'_, T>,
    opts: &QuadratureOptions,
) -> Result<ProjectedErrors, AnalysisError> {
    let uh = PiecewisePlaneWaves::from_system(coarse);
    let uref = PiecewisePlaneWaves::from_system(reference);
    let mesh = reference.disc.mesh;
    let k = reference.disc.k.to_f64_lossy();
    let parts: Vec<([f64; 4], bool)> = (0..mesh.elements.len())
        .into_par_iter()
        .map(|e| {
            let pts = mesh.element_points(e);
            let c = mesh.elements[e].centroid;
            let parent = uh
                .locate(c)
                .ok_or(AnalysisError::Locate { x: c.x.to_f64_lossy(), y: c.y.to_f64_lossy() })?;
            let f = |x: Point<T>| Ok(densities(uref.eval_on(e, x), uh.eval_on(parent, x)));
            let mass = uref.coeff_mass(e) + uh.coeff_mass(parent);
            let tol = tolerances(&pts, c, &|x| Ok(uref.eval_on(e, x)), mass, k);
            integrate_polygon(&pts, c, &f, tol, opts)
        })
        .collect::<Result<_, _>>()?;
    Ok(reduce(parts, coarse.disc.k.to_f64_lossy()))
}

fn reduce(parts: Vec<([f64; 4], bool)>, k: f64) -> ProjectedErrors {
    let mut s = [0.0; 4];
    let mut bad = 0;
    for (v, ok) in parts {
        for i in 0..4 {
            s[i] += v[i];
        }
        bad += usize::from(!ok);
    }
    ProjectedErrors::from_sums(s, k, bad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_area_and_moment() {
        let sq = [Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(2.0, 1.0), Point::new(0.0, 1.0)];
        let f = |x: Point<f64>| Ok([1.0, x.x * x.x * x.y]);
        let (v, ok) = integrate_polygon(&sq, Point::new(1.0, 0.5), &f, [ComponentTol::default(); 2], &QuadratureOptions::default()).unwrap();
        assert!(ok);
        assert!((v[0] - 2.0).abs() < 1e-13);
        assert!((v[1] - 4.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn corner_singularity_refines() {
        // ∫ r^{-2/3} over the unit square corner cell
        let sq = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)];
        let f = |x: Point<f64>| Ok([x.norm().powf(-2.0 / 3.0)]);
        let opts = QuadratureOptions { rel_tol: 1e-8, max_depth: 30, base_level: 0 };
        let (v, _) = integrate_polygon(&sq, Point::new(0.5, 0.5), &f, [ComponentTol::default()], &opts).unwrap();
        // 2 ∫_0^{π/4} ∫_0^{1/cos t} r^{1/3} dr dt
        let n = 20000;
        let mut exact = 0.0;
        for i in 0..n {
            let t = (i as f64 + 0.5) / n as f64 * std::f64::consts::FRAC_PI_4;
            exact += 0.75 * t.cos().powf(-4.0 / 3.0);
        }
        exact *= 2.0 * std::f64::consts::FRAC_PI_4 / n as f64;
        assert!((v[0] - exact).abs() < 1e-7 * exact, "{} vs {}", v[0], exact);
    }

    #[test]
    fn point_location() {
        let pw = PiecewisePlaneWaves::<f64> {
            k: 1.0,
            centroids: vec![Point::new(0.5, 0.5)],
            dirs: vec![vec![]],
            coeffs: vec![vec![]],
            polygons: vec![vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)]],
        };
        assert_eq!(pw.locate(Point::new(0.3, 0.9)), Some(0));
        assert_eq!(pw.locate(Point::new(1.0, 0.5)), Some(0));
        assert_eq!(pw.locate(Point::new(1.2, 0.5)), None);
    }
}
