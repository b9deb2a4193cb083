//! Brute-force quadrature references for the closed-form local matrices.
//! Nothing here calls the library's own integration kernels or rules.

use rand::Rng;
use trefftz_vem::{Complex, Point};

/// Gauss–Legendre nodes and weights on [0, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=n {
                let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((0.5 * (1.0 - x), 1.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn pw(d: Point, k: f64, x: Point, c: Point) -> Complex {
    let t = k * d.dot(x - c);
    Complex::new(t.cos(), t.sin())
}

/// Composite rule on a segment: (point, weight) with enough panels for
/// oscillation frequency `freq`.
pub fn segment_rule(a: Point, b: Point, freq: f64) -> Vec<(Point, f64)> {
    let h = a.dist(b);
    let panels = (freq * h).ceil().max(2.0) as usize;
    let gl = gauss_legendre(24);
    let mut out = Vec::new();
    for p in 0..panels {
        let (s0, s1) = (p as f64 / panels as f64, (p + 1) as f64 / panels as f64);
        for &(t, w) in &gl {
            let s = s0 + (s1 - s0) * t;
            out.push((a + (b - a) * s, w * (s1 - s0) * h));
        }
    }
    out
}

/// Collapsed product rule on the triangle (c, a, b), subdivided for `freq`.
pub fn triangle_rule(c: Point, a: Point, b: Point, freq: f64) -> Vec<(Point, f64)> {
    let diam = c.dist(a).max(c.dist(b)).max(a.dist(b));
    let m = (freq * diam / 2.0).ceil().max(2.0) as usize;
    let gl = gauss_legendre(16);
    let jac = (a - c).cross(b - a).abs();
    let mut out = Vec::new();
    for iu in 0..m {
        for iv in 0..m {
            for &(tu, wu) in &gl {
                let u = (iu as f64 + tu) / m as f64;
                for &(tv, wv) in &gl {
                    let v = (iv as f64 + tv) / m as f64;
                    let x = c + ((a - c) + (b - a) * v) * u;
                    out.push((x, wu * wv * u * jac / (m * m) as f64));
                }
            }
        }
    }
    out
}

pub type Dense = Vec<Vec<Complex>>;

fn zeros(r: usize, c: usize) -> Dense {
    vec![vec![Complex::new(0.0, 0.0); c]; r]
}

/// G_{j,l} = ∫_K ∇w_l·conj(∇w_j) − k² w_l conj(w_j) by area quadrature on
/// the fan from `star` (every fan triangle must lie in K).
pub fn g_area(pts: &[Point], star: Point, centroid: Point, dirs: &[Point], k: f64) -> Dense {
    let p = dirs.len();
    let mut g = zeros(p, p);
    let n = pts.len();
    for i in 0..n {
        for (x, w) in triangle_rule(star, pts[i], pts[(i + 1) % n], 2.0 * k) {
            let v: Vec<Complex> = dirs.iter().map(|&d| pw(d, k, x, centroid)).collect();
            for j in 0..p {
                for l in 0..p {
                    let f = k * k * (dirs[l].dot(dirs[j]) - 1.0);
                    g[j][l] += v[l] * v[j].conj() * (f * w);
                }
            }
        }
    }
    g
}

/// ∫_∂K w_m conj(∂_n w_j) by boundary quadrature; equals G by Green's formula.
pub fn g_boundary(pts: &[Point], centroid: Point, dirs: &[Point], k: f64) -> Dense {
    let p = dirs.len();
    let mut g = zeros(p, p);
    let n = pts.len();
    for s in 0..n {
        let (a, b) = (pts[s], pts[(s + 1) % n]);
        let t = b - a;
        let nrm = Point::new(t.y, -t.x).scale(1.0 / t.norm());
        for (x, w) in segment_rule(a, b, 2.0 * k) {
            let v: Vec<Complex> = dirs.iter().map(|&d| pw(d, k, x, centroid)).collect();
            for j in 0..p {
                let dn = Complex::new(0.0, k * dirs[j].dot(nrm)) * v[j];
                for m in 0..p {
                    g[j][m] += v[m] * dn.conj() * w;
                }
            }
        }
    }
    g
}

/// D_{(s,r),m} = (1/h_s) ∫_s w_m conj(w^s_r), edge waves centred at edge midpoints.
pub fn d_edges(pts: &[Point], centroid: Point, dirs: &[Point], edge_dirs: &[&[Point]], k: f64) -> Dense {
    let n = pts.len();
    let rows: usize = edge_dirs.iter().map(|d| d.len()).sum();
    let mut d = zeros(rows, dirs.len());
    let mut off = 0;
    for s in 0..n {
        let (a, b) = (pts[s], pts[(s + 1) % n]);
        let h = a.dist(b);
        let xe = a.midpoint(b);
        for (x, w) in segment_rule(a, b, 2.0 * k) {
            for (r, &de) in edge_dirs[s].iter().enumerate() {
                let we = pw(de, k, x, xe).conj();
                for (m, &dm) in dirs.iter().enumerate() {
                    d[off + r][m] += pw(dm, k, x, centroid) * we * (w / h);
                }
            }
        }
        off += edge_dirs[s].len();
    }
    d
}

/// Edge Gram matrix (j, l) = ∫_e w_l conj(w_j) with waves centred at the midpoint.
pub fn edge_mass(a: Point, b: Point, dirs: &[Point], k: f64) -> Dense {
    let xe = a.midpoint(b);
    let p = dirs.len();
    let mut g = zeros(p, p);
    for (x, w) in segment_rule(a, b, 2.0 * k) {
        let v: Vec<Complex> = dirs.iter().map(|&d| pw(d, k, x, xe)).collect();
        for j in 0..p {
            for l in 0..p {
                g[j][l] += v[l] * v[j].conj() * w;
            }
        }
    }
    g
}

/// max |A − B| / max |B|.
pub fn rel_diff(a: impl Fn(usize, usize) -> Complex, b: &Dense) -> f64 {
    let scale = b.iter().flatten().fold(0.0f64, |m, z| m.max(z.norm()));
    let mut err = 0.0f64;
    for (i, row) in b.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            err = err.max((a(i, j) - z).norm());
        }
    }
    err / scale
}

/// Counterclockwise star-shaped polygon around `center` with 3..=9 vertices,
/// every angular gap below π and radii in [0.3, 1]·size.
pub fn random_star_polygon(rng: &mut impl Rng, center: Point, size: f64) -> Vec<Point> {
    loop {
        let n = rng.gen_range(3..=9);
        let mut ang: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
        ang.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let gaps_ok = (0..n).all(|i| {
            let next = if i + 1 < n { ang[i + 1] } else { ang[0] + std::f64::consts::TAU };
            let gap = next - ang[i];
            gap > 0.05 && gap < 0.9 * std::f64::consts::PI
        });
        if !gaps_ok {
            continue;
        }
        return ang
            .iter()
            .map(|&t| {
                let r = size * rng.gen_range(0.3..1.0);
                Point::new(center.x + r * t.cos(), center.y + r * t.sin())
            })
            .collect();
    }
}

/// Area centroid of a simple polygon.
pub fn centroid(pts: &[Point]) -> Point {
    let n = pts.len();
    let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (p, q) = (pts[i], pts[(i + 1) % n]);
        let c = p.cross(q);
        a += c;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    Point::new(cx / (3.0 * a), cy / (3.0 * a))
}

/// Worst relative deviations of one randomized polygon.
#[derive(Clone, Copy, Debug)]
pub struct OracleCase {
    pub k: f64,
    pub q: usize,
    pub vertices: usize,
    pub g: f64,
    pub g_green: f64,
    pub d: f64,
    pub g0: f64,
}

impl OracleCase {
    pub fn worst(&self) -> f64 {
        self.g.max(self.g_green).max(self.d).max(self.g0)
    }
}

/// Gᴷ, Bᴷ (through Bᴷ·Dᴷ = boundary form), Dᴷ and G₀ᵉ against quadrature on
/// `count` random polygons, cycling k ∈ {5, 20} and q ∈ {2, 4, 7}.
pub fn randomized_local_matrices(count: usize, seed: u64) -> Vec<OracleCase> {
    use rand::SeedableRng;
    use trefftz_vem::assembly::{local_b_full, local_d_full, local_g};
    use trefftz_vem::planewave::{edge_mass_matrix, DirectionSet};

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let combos = [(5.0, 2), (5.0, 4), (5.0, 7), (20.0, 2), (20.0, 4), (20.0, 7)];
    (0..count)
        .map(|i| {
            let (k, q) = combos[i % combos.len()];
            let center = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let size = rng.gen_range(0.05..0.6);
            let pts = random_star_polygon(&mut rng, center, size);
            let c = centroid(&pts);
            let dirs = DirectionSet::<f64>::equispaced(q).dirs;
            let edge_dirs: Vec<&[Point]> = pts.iter().map(|_| &dirs[..]).collect();

            let g = local_g(&pts, c, &dirs, k);
            let g_ref = g_area(&pts, center, c, &dirs, k);
            let d = local_d_full(&pts, c, &dirs, k, &edge_dirs);
            let d_ref = d_edges(&pts, c, &dirs, &edge_dirs, k);
            let b = local_b_full(&pts, c, &dirs, k, &edge_dirs);
            let green = g_boundary(&pts, c, &dirs, k);
            let bd = |j: usize, m: usize| (0..b.ncols()).fold(Complex::new(0.0, 0.0), |acc, i| acc + b[(j, i)] * d_ref[i][m]);
            let n = pts.len();
            let g0 = (0..n)
                .map(|s| {
                    let (a, e) = (pts[s], pts[(s + 1) % n]);
                    let m = edge_mass_matrix(a, e, &dirs, k);
                    rel_diff(|r, c| Complex::new(m[(r, c)], 0.0), &edge_mass(a, e, &dirs, k))
                })
                .fold(0.0f64, f64::max);
            OracleCase {
                k,
                q,
                vertices: n,
                g: rel_diff(|r, c| g[(r, c)], &g_ref),
                g_green: rel_diff(bd, &green),
                d: rel_diff(|r, c| d[(r, c)], &d_ref),
                g0,
            }
        })
        .collect()
}
