use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Self) -> T {
        (self - o).norm()
    }

    pub fn scale(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s)
    }

    pub fn midpoint(self, o: Self) -> Self {
        (self + o).scale(T::lit(0.5))
    }

    pub fn cast<U: Real>(self) -> Point<U> {
        Point::new(U::lit(self.x.to_f64_lossy()), U::lit(self.y.to_f64_lossy()))
    }
}

impl<T: Real> Add for Point<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Real> Sub for Point<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Real> Neg for Point<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl<T: Real> Mul<T> for Point<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

/// Signed area of a closed polygon (positive for counterclockwise order).
pub fn signed_area<T: Real>(pts: &[Point<T>]) -> T {
    let n = pts.len();
    let mut a = T::zero();
    for i in 0..n {
        a = a + pts[i].cross(pts[(i + 1) % n]);
    }
    a * T::lit(0.5)
}

/// Area centroid of a simple polygon.
pub fn area_centroid<T: Real>(pts: &[Point<T>]) -> Point<T> {
    let n = pts.len();
    // shift to the first vertex to limit cancellation
    let o = pts[0];
    let mut a = T::zero();
    let mut cx = T::zero();
    let mut cy = T::zero();
    for i in 0..n {
        let p = pts[i] - o;
        let q = pts[(i + 1) % n] - o;
        let w = p.cross(q);
        a = a + w;
        cx = cx + (p.x + q.x) * w;
        cy = cy + (p.y + q.y) * w;
    }
    let s = T::one() / (T::lit(3.0) * a);
    Point::new(o.x + cx * s, o.y + cy * s)
}

/// Largest pairwise vertex distance.
pub fn diameter<T: Real>(pts: &[Point<T>]) -> T {
    let mut d = T::zero();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            d = d.max(pts[i].dist(pts[j]));
        }
    }
    d
}

/// True when the closed polyline has no self intersections (touching
/// consecutive edges excluded).
pub fn is_simple<T: Real>(pts: &[Point<T>]) -> bool {
    let n = pts.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        for j in i + 1..n {
            if j == i || (j + 1) % n == i || j == (i + 1) % n {
                continue;
            }
            let c = pts[j];
            let d = pts[(j + 1) % n];
            if segments_cross(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

fn segments_cross<T: Real>(a: Point<T>, b: Point<T>, c: Point<T>, d: Point<T>) -> bool {
    let o1 = (b - a).cross(c - a);
    let o2 = (b - a).cross(d - a);
    let o3 = (d - c).cross(a - c);
    let o4 = (d - c).cross(b - c);
    let z = T::zero();
    ((o1 > z && o2 < z) || (o1 < z && o2 > z)) && ((o3 > z && o4 < z) || (o3 < z && o4 > z))
}
