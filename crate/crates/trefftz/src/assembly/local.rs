use std::fmt;

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use super::{Discretization, EdgeData, Stabilization};
use crate::geometry::Point;
use crate::planewave::edge_pw_integral;
use crate::scalar::{cis, cplx, czero, Real, C};

/// Gᴷ_{j,ℓ} = aᴷ(w_ℓ, w_j) from boundary integrals of plane-wave products.
pub fn local_g<T: Real>(pts: &[Point<T>], centroid: Point<T>, dirs: &[Point<T>], k: T) -> Mat<C<T>> {
    let p = dirs.len();
    let n = pts.len();
    let mut g = Mat::<C<T>>::zeros(p, p);
    for i in 0..n {
        let a = pts[i] - centroid;
        let b = pts[(i + 1) % n] - centroid;
        let t = b - a;
        let nrm = Point::new(t.y, -t.x).scale(T::one() / t.norm());
        for l in 0..p {
            let ik_dn = cplx(T::zero(), k * dirs[l].dot(nrm));
            for j in 0..p {
                g[(j, l)] = g[(j, l)] + ik_dn * edge_pw_integral(a, b, dirs[l], dirs[j], k);
            }
        }
    }
    g
}

/// Bᴷ in the edge bases: Bᴷ_{j,(s,ℓ)} = −ik (d_j·n_s) e^{−ik d_j·(x_s − x_K)} h_s C^s_{j,ℓ}.
pub fn local_b<T: Real>(
    pts: &[Point<T>],
    centroid: Point<T>,
    dirs: &[Point<T>],
    k: T,
    edges: &[&EdgeData<T>],
) -> Mat<C<T>> {
    let coeffs: Vec<&faer::Mat<T>> = edges.iter().map(|e| &e.trace_coeff).collect();
    b_with(pts, centroid, dirs, k, &coeffs)
}

/// Bᴷ against the unreduced edge plane waves (one column per edge direction).
pub fn local_b_full<T: Real>(
    pts: &[Point<T>],
    centroid: Point<T>,
    dirs: &[Point<T>],
    k: T,
    edge_dirs: &[&[Point<T>]],
) -> Mat<C<T>> {
    let eye: Vec<Mat<T>> = edge_dirs.iter().map(|d| Mat::<T>::identity(d.len(), d.len())).collect();
    let coeffs: Vec<&Mat<T>> = eye.iter().collect();
    b_with(pts, centroid, dirs, k, &coeffs)
}

fn b_with<T: Real>(pts: &[Point<T>], centroid: Point<T>, dirs: &[Point<T>], k: T, coeffs: &[&Mat<T>]) -> Mat<C<T>> {
    let p = dirs.len();
    let n = pts.len();
    let cols: usize = coeffs.iter().map(|c| c.ncols()).sum();
    let mut b = Mat::<C<T>>::zeros(p, cols);
    let mut off = 0;
    for s in 0..n {
        let a = pts[s];
        let e = pts[(s + 1) % n];
        let t = e - a;
        let h = t.norm();
        let nrm = Point::new(t.y, -t.x).scale(T::one() / h);
        let xe = a.midpoint(e);
        let c = coeffs[s];
        for j in 0..p {
            let f = cplx(T::zero(), -k * dirs[j].dot(nrm) * h) * cis(-k * dirs[j].dot(xe - centroid));
            for l in 0..c.ncols() {
                let cj = c[(j, l)];
                if cj != T::zero() {
                    b[(j, off + l)] = f * cj;
                }
            }
        }
        off += c.ncols();
    }
    b
}

/// Dᴷ_{(s,ℓ),m} = dof_{s,ℓ}(w_m) = (1/h_s) ∫_s w_m conj(ŵ_ℓ).
pub fn local_d<T: Real>(
    pts: &[Point<T>],
    centroid: Point<T>,
    dirs: &[Point<T>],
    k: T,
    edges: &[&EdgeData<T>],
) -> Mat<C<T>> {
    let raw: Vec<(&[Point<T>], &Mat<T>)> = edges.iter().map(|e| (&e.raw_dirs[..], &e.combo)).collect();
    d_with(pts, centroid, dirs, k, &raw)
}

/// Dᴷ against the unreduced edge plane waves.
pub fn local_d_full<T: Real>(
    pts: &[Point<T>],
    centroid: Point<T>,
    dirs: &[Point<T>],
    k: T,
    edge_dirs: &[&[Point<T>]],
) -> Mat<C<T>> {
    let eye: Vec<Mat<T>> = edge_dirs.iter().map(|d| Mat::<T>::identity(d.len(), d.len())).collect();
    let raw: Vec<(&[Point<T>], &Mat<T>)> = edge_dirs.iter().zip(&eye).map(|(d, i)| (*d, i)).collect();
    d_with(pts, centroid, dirs, k, &raw)
}

fn d_with<T: Real>(
    pts: &[Point<T>],
    centroid: Point<T>,
    dirs: &[Point<T>],
    k: T,
    raw: &[(&[Point<T>], &Mat<T>)],
) -> Mat<C<T>> {
    let p = dirs.len();
    let n = pts.len();
    let rows: usize = raw.iter().map(|r| r.1.ncols()).sum();
    let mut d = Mat::<C<T>>::zeros(rows, p);
    let mut off = 0;
    for s in 0..n {
        let a = pts[s];
        let e = pts[(s + 1) % n];
        let xe = a.midpoint(e);
        let h = a.dist(e);
        let (rdirs, combo) = raw[s];
        // moments against the raw edge plane waves
        let mut m = Mat::<C<T>>::zeros(rdirs.len(), p);
        for mm in 0..p {
            let phase = cis(k * dirs[mm].dot(xe - centroid));
            for r in 0..rdirs.len() {
                m[(r, mm)] = phase * edge_pw_integral(a - xe, e - xe, dirs[mm], rdirs[r], k) / h;
            }
        }
        for l in 0..combo.ncols() {
            for mm in 0..p {
                let mut acc = czero::<T>();
                for r in 0..rdirs.len() {
                    let c = combo[(r, l)];
                    if c != T::zero() {
                        acc = acc + m[(r, mm)] * c;
                    }
                }
                d[(off + l, mm)] = acc;
            }
        }
        off += combo.ncols();
    }
    d
}

/// Π* = G⁻¹B and Π = DΠ*.
pub fn projector_matrices<T: Real>(g: &Mat<C<T>>, b: &Mat<C<T>>, d: &Mat<C<T>>) -> (Mat<C<T>>, Mat<C<T>>) {
    let pi_star = g.partial_piv_lu().solve(b);
    let pi = d * &pi_star;
    (pi_star, pi)
}

/// Diagonal of the stabilization: identity, or max(Re aᴷ(Πφ_i, Πφ_i), 1)
/// read off the consistency matrix.
pub fn stabilization<T: Real>(kind: Stabilization, consistent: &Mat<C<T>>) -> Mat<C<T>> {
    let n = consistent.ncols();
    match kind {
        Stabilization::Identity => Mat::<C<T>>::identity(n, n),
        Stabilization::ModifiedDRecipe => Mat::<C<T>>::from_fn(n, n, |r, c| {
            if r == c {
                cplx(consistent[(c, c)].re.max(T::one()), T::zero())
            } else {
                czero()
            }
        }),
    }
}

/// Consistency part Π*ᴴ G Π*, evaluated as Bᴴ Π* = Bᴴ G⁻¹ B. Multiplying
/// the solve result by G a second time loses several more digits once Gᴷ
/// is badly conditioned.
pub fn consistency_matrix<T: Real>(b: &Mat<C<T>>, pi_star: &Mat<C<T>>) -> Mat<C<T>> {
    b.adjoint() * pi_star
}

/// Aᴷ = Π*ᴴ G Π* + (I − Π)ᴴ S (I − Π); rows are test functions.
pub fn local_stiffness<T: Real>(consistent: &Mat<C<T>>, pi: &Mat<C<T>>, s: &Mat<C<T>>) -> Mat<C<T>> {
    let n = pi.nrows();
    let ip = Mat::<C<T>>::identity(n, n) - pi;
    consistent + ip.adjoint() * (s * &ip)
}

/// Element whose Gᴷ is numerically singular, with the Neumann–Laplace
/// eigenvalue of its bounding box closest to k².
#[derive(Clone, Debug, PartialEq)]
pub struct NearSingular {
    pub element: usize,
    /// min |λ| / max |λ| of Gᴷ.
    pub ratio: f64,
    pub k: f64,
    pub nearest_mode: (usize, usize),
    pub nearest_nu: f64,
    /// k times the element diameter; small values mean nearly dependent
    /// plane waves rather than a resonance.
    pub kh: f64,
}

impl fmt::Display for NearSingular {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "element {}: G^K near singular (min/max |eig| = {:.3e}); k^2 = {:.6} nearest nu_{{{},{}}} = {:.6}, k h_K = {:.3}",
            self.element,
            self.ratio,
            self.k * self.k,
            self.nearest_mode.0,
            self.nearest_mode.1,
            self.nearest_nu,
            self.kh
        )
    }
}

pub const SINGULAR_RATIO: f64 = 1e-13;

/// Checks the eigenvalue spread of the Hermitian Gᴷ.
pub fn near_singular<T: Real>(g: &Mat<C<T>>, pts: &[Point<T>], k: T, element: usize) -> Option<NearSingular> {
    let ev = g.self_adjoint_eigenvalues(Side::Lower).ok()?;
    let mx = ev.iter().fold(0.0f64, |m, v| m.max(v.to_f64_lossy().abs()));
    let mn = ev.iter().fold(f64::INFINITY, |m, v| m.min(v.to_f64_lossy().abs()));
    let ratio = if mx > 0.0 { mn / mx } else { 0.0 };
    if ratio >= SINGULAR_RATIO {
        return None;
    }
    let (mut lx, mut ly, mut diam) = (0.0f64, 0.0f64, 0.0f64);
    for a in pts {
        for b in pts {
            diam = diam.max(a.dist(*b).to_f64_lossy());
            lx = lx.max((a.x - b.x).to_f64_lossy().abs());
            ly = ly.max((a.y - b.y).to_f64_lossy().abs());
        }
    }
    let kf = k.to_f64_lossy();
    let mut best = ((0, 0), f64::INFINITY);
    let mmax = ((kf * lx / std::f64::consts::PI).ceil() as usize + 2).min(200);
    let nmax = ((kf * ly / std::f64::consts::PI).ceil() as usize + 2).min(200);
    for m in 0..=mmax {
        for n in 0..=nmax {
            let nu = std::f64::consts::PI.powi(2) * ((m * m) as f64 / (lx * lx) + (n * n) as f64 / (ly * ly));
            if (nu - kf * kf).abs() < (best.1 - kf * kf).abs() {
                best = ((m, n), nu);
            }
        }
    }
    Some(NearSingular { element, ratio, k: kf, nearest_mode: best.0, nearest_nu: best.1, kh: kf * diam })
}

/// All local matrices of one element.
#[derive(Clone, Debug)]
pub struct LocalElementMatrices<T> {
    pub g: Mat<C<T>>,
    pub b: Mat<C<T>>,
    pub d: Mat<C<T>>,
    pub pi_star: Mat<C<T>>,
    pub pi: Mat<C<T>>,
    pub s: Mat<C<T>>,
    pub a: Mat<C<T>>,
}

impl<T: Real> LocalElementMatrices<T> {
    pub fn compute(disc: &Discretization<'_, T>, element: usize, stab: Stabilization) -> Self {
        let mesh = disc.mesh;
        let el = &mesh.elements[element];
        let pts = mesh.element_points(element);
        let dirs = disc.layout.element_dirs(element);
        let edges: Vec<&EdgeData<T>> = el.edges.iter().map(|&e| &disc.edges[e]).collect();
        let g = local_g(&pts, el.centroid, dirs, disc.k);
        let b = local_b(&pts, el.centroid, dirs, disc.k, &edges);
        let d = local_d(&pts, el.centroid, dirs, disc.k, &edges);
        let (pi_star, pi) = projector_matrices(&g, &b, &d);
        let consistent = consistency_matrix(&b, &pi_star);
        let s = stabilization(stab, &consistent);
        let a = local_stiffness(&consistent, &pi, &s);
        Self { g, b, d, pi_star, pi, s, a }
    }
}
