use faer::Mat;

use crate::geometry::Point;
use crate::scalar::{cis, cone, cplx, expm1_c, Real, C};

/// Φ(z) = (e^z - 1)/z with Φ(0) = 1.
pub fn phi<T: Real>(z: C<T>) -> C<T> {
    let r = z.norm();
    if r < T::lit(1e-3) {
        // Taylor series: sum z^n/(n+1)!
        let mut term = cone::<T>();
        let mut sum = cone::<T>();
        for n in 1..8 {
            term = term * z / T::lit((n + 1) as f64);
            sum = sum + term;
        }
        sum
    } else {
        expm1_c(z) / z
    }
}

/// ∫_e e^{ik(d_l - d_j)·x} ds over the segment from `a` to `b`.
pub fn edge_pw_integral<T: Real>(a: Point<T>, b: Point<T>, d_l: Point<T>, d_j: Point<T>, k: T) -> C<T> {
    let delta = d_l - d_j;
    let h = a.dist(b);
    let z = cplx(T::zero(), k * delta.dot(b - a));
    cis(k * delta.dot(a)) * phi(z) * h
}

/// Real symmetric Gram matrix of edge plane waves centred at the edge
/// midpoint: entry (j, l) = ∫_e w_l conj(w_j). A zero direction stands for
/// the constant function.
pub fn edge_mass_matrix<T: Real>(a: Point<T>, b: Point<T>, dirs: &[Point<T>], k: T) -> Mat<T> {
    let h = a.dist(b);
    let t = b - a;
    let n = dirs.len();
    let mut g = Mat::<T>::zeros(n, n);
    for j in 0..n {
        g[(j, j)] = h;
        for l in j + 1..n {
            let half = k * (dirs[l] - dirs[j]).dot(t) * T::lit(0.5);
            let v = h * sinc(half);
            g[(j, l)] = v;
            g[(l, j)] = v;
        }
    }
    g
}

fn sinc<T: Real>(x: T) -> T {
    if x.abs() < T::lit(1e-4) {
        let x2 = x * x;
        T::one() - x2 / T::lit(6.0) + x2 * x2 / T::lit(120.0)
    } else {
        x.sin() / x
    }
}
