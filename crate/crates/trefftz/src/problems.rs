//! Analytic Helmholtz solutions, boundary data and scattering setups.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::assembly::{BoundaryCondition, BoundaryFn, ProblemSpec};
use crate::geometry::Point;
use crate::scalar::{cis, cplx, Real, C};
use crate::special::{bessel_j, bessel_j_prime, hankel1_0, hankel1_1};

/// Exponent of the corner-type solution u3.
pub const XI: f64 = 2.0 / 3.0;
/// Source point of u2.
pub const U2_SOURCE: (f64, f64) = (-0.25, 0.0);
/// Pole of u3.
pub const U3_POLE: (f64, f64) = (0.0, 0.5);
/// Propagation angle of u4.
pub const U4_ANGLE: f64 = 2.0 * PI / 17.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolutionTag {
    U0,
    U1,
    U2,
    U3,
    U4,
}

impl FromStr for SolutionTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "u0" => Ok(Self::U0),
            "u1" => Ok(Self::U1),
            "u2" => Ok(Self::U2),
            "u3" => Ok(Self::U3),
            "u4" => Ok(Self::U4),
            other => Err(format!("unknown solution `{other}` (expected u0..u4)")),
        }
    }
}

impl fmt::Display for SolutionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::U0 => "u0",
            Self::U1 => "u1",
            Self::U2 => "u2",
            Self::U3 => "u3",
            Self::U4 => "u4",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("u3 is singular at (0, 0.5)")]
    SingularPoint,
    #[error("u2 is singular at its source point")]
    SourcePoint,
}

/// Value and gradient of an analytic solution.
pub type ValueGrad<T> = (C<T>, [C<T>; 2]);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticSolution<T> {
    pub tag: SolutionTag,
    pub k: T,
}

impl<T: Real> AnalyticSolution<T> {
    pub fn new(tag: SolutionTag, k: T) -> Self {
        Self { tag, k }
    }

    /// Propagation direction of the plane-wave solutions.
    pub fn direction(&self) -> Option<Point<T>> {
        let ang = match self.tag {
            SolutionTag::U0 => 0.0,
            SolutionTag::U1 => FRAC_PI_4,
            SolutionTag::U4 => U4_ANGLE,
            _ => return None,
        };
        Some(Point::new(T::lit(ang.cos()), T::lit(ang.sin())))
    }

    pub fn eval(&self, x: Point<T>) -> Result<ValueGrad<T>, ProblemError> {
        let k = self.k;
        if let Some(d) = self.direction() {
            let v = cis(k * d.dot(x));
            let ik = cplx(T::zero(), k);
            return Ok((v, [ik * v * d.x, ik * v * d.y]));
        }
        let kf = k.to_f64_lossy();
        let (xf, yf) = (x.x.to_f64_lossy(), x.y.to_f64_lossy());
        let cast = |z: (f64, f64)| cplx(T::lit(z.0), T::lit(z.1));
        match self.tag {
            SolutionTag::U2 => {
                let (dx, dy) = (xf - U2_SOURCE.0, yf - U2_SOURCE.1);
                let rho = dx.hypot(dy);
                if rho == 0.0 {
                    return Err(ProblemError::SourcePoint);
                }
                let h0 = hankel1_0(kf * rho);
                let h1 = hankel1_1(kf * rho);
                // d/dρ H0(kρ) = −k H1(kρ)
                let g = |c: f64| cast((-kf * h1.0 * c / rho, -kf * h1.1 * c / rho));
                Ok((cast(h0), [g(dx), g(dy)]))
            }
            SolutionTag::U3 => {
                let (dx, dy) = (xf - U3_POLE.0, yf - U3_POLE.1);
                let r = dx.hypot(dy);
                if r == 0.0 {
                    return Err(ProblemError::SingularPoint);
                }
                // principal angle in (−π, π]; continuous on the unit square
                let th = dy.atan2(dx);
                let j = bessel_j(XI, kf * r);
                let dj = kf * bessel_j_prime(XI, kf * r);
                let (c, s) = ((XI * th).cos(), (XI * th).sin());
                let ur = dj * c;
                let ut = -XI * j * s / r;
                let (ct, st) = (th.cos(), th.sin());
                let gx = ur * ct - ut * st;
                let gy = ur * st + ut * ct;
                Ok((cast((j * c, 0.0)), [cast((gx, 0.0)), cast((gy, 0.0))]))
            }
            _ => unreachable!("plane waves handled above"),
        }
    }

    pub fn value(&self, x: Point<T>) -> Result<C<T>, ProblemError> {
        self.eval(x).map(|v| v.0)
    }
}

fn nan<T: Real>() -> C<T> {
    cplx(T::nan(), T::nan())
}

/// Dirichlet, Neumann and impedance traces (g_D, g_N, g_R) of a solution.
/// Evaluation failures yield NaN so quadrature can avoid singular nodes.
pub fn boundary_data<T: Real>(sol: AnalyticSolution<T>, theta: T) -> (BoundaryFn<T>, BoundaryFn<T>, BoundaryFn<T>) {
    let gd: BoundaryFn<T> = Arc::new(move |x, _n| sol.value(x).unwrap_or_else(|_| nan()));
    let gn: BoundaryFn<T> = Arc::new(move |x, n: Point<T>| match sol.eval(x) {
        Ok((_, g)) => g[0] * n.x + g[1] * n.y,
        Err(_) => nan(),
    });
    let gr: BoundaryFn<T> = Arc::new(move |x, n: Point<T>| match sol.eval(x) {
        Ok((v, g)) => g[0] * n.x + g[1] * n.y + cplx(T::zero(), sol.k * theta) * v,
        Err(_) => nan(),
    });
    (gd, gn, gr)
}

fn zero_fn<T: Real>() -> BoundaryFn<T> {
    Arc::new(|_, _| cplx(T::zero(), T::zero()))
}

impl<T: Real> ProblemSpec<T> {
    /// Boundary value problem with exact solution `sol`; edges labelled
    /// `Scatterer` get `scatterer`.
    pub fn from_solution(sol: AnalyticSolution<T>, theta: T) -> Self {
        let (g_d, g_n, g_r) = boundary_data(sol, theta);
        let singular_points = match sol.tag {
            SolutionTag::U3 => vec![Point::new(T::lit(U3_POLE.0), T::lit(U3_POLE.1))],
            _ => Vec::new(),
        };
        Self { k: sol.k, theta, g_d, g_n, g_r, scatterer: BoundaryCondition::Dirichlet, singular_points }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScatteringKind {
    /// u = 0 on the scatterer.
    SoundSoft,
    /// ∂u/∂n = 0 on the scatterer.
    SoundHard,
}

impl FromStr for ScatteringKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "soft" => Ok(Self::SoundSoft),
            "hard" => Ok(Self::SoundHard),
            other => Err(format!("unknown scatterer `{other}` (expected soft or hard)")),
        }
    }
}

/// Total-field problem on the hole mesh: homogeneous Dirichlet or Neumann
/// on the scatterer and the impedance trace of the incident wave (θ = 1)
/// on the outer boundary.
pub fn make_scattering<T: Real>(kind: ScatteringKind, incident: SolutionTag, k: T) -> ProblemSpec<T> {
    assert!(
        matches!(incident, SolutionTag::U0 | SolutionTag::U1 | SolutionTag::U4),
        "incident field must be a plane wave"
    );
    let theta = T::one();
    let (_, _, g_r) = boundary_data(AnalyticSolution::new(incident, k), theta);
    ProblemSpec {
        k,
        theta,
        g_d: zero_fn(),
        g_n: zero_fn(),
        g_r,
        scatterer: match kind {
            ScatteringKind::SoundSoft => BoundaryCondition::Dirichlet,
            ScatteringKind::SoundHard => BoundaryCondition::Neumann,
        },
        singular_points: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u0_at_origin() {
        let s = AnalyticSolution::new(SolutionTag::U0, 13.0);
        assert_eq!(s.value(Point::origin()).unwrap(), cplx(1.0, 0.0));
    }

    #[test]
    fn u1_is_symmetric() {
        let s = AnalyticSolution::new(SolutionTag::U1, 20.0);
        let a = s.value(Point::new(0.3, 0.8)).unwrap();
        let b = s.value(Point::new(0.8, 0.3)).unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn u2_matches_reference() {
        // H0^(1)(20 |(0.75, 0.5)|) from a 30-digit evaluation
        let s = AnalyticSolution::new(SolutionTag::U2, 20.0);
        let v = s.value(Point::new(0.5, 0.5)).unwrap();
        let e = cplx(-0.008_137_295_467_754_188, -0.187_706_108_244_558_13);
        assert!((v - e).norm() <= 1e-10 * e.norm(), "{v} vs {e}");
    }

    #[test]
    fn u3_pole_is_an_error() {
        let s = AnalyticSolution::new(SolutionTag::U3, 10.0);
        assert_eq!(s.eval(Point::new(0.0, 0.5)), Err(ProblemError::SingularPoint));
    }

    #[test]
    fn u4_direction() {
        let s = AnalyticSolution::<f64>::new(SolutionTag::U4, 15.0);
        let d = s.direction().unwrap();
        assert!((d.y.atan2(d.x) - 2.0 * PI / 17.0).abs() < 1e-15);
    }

    #[test]
    fn impedance_trace_of_u0_on_right_edge() {
        let k = 7.0;
        for theta in [1.0, -1.0] {
            let s = AnalyticSolution::new(SolutionTag::U0, k);
            let (_, gn, gr) = boundary_data(s, theta);
            let x = Point::new(1.0, 0.3);
            let u = s.value(x).unwrap();
            let expect = cplx(0.0, k * (1.0 + theta)) * u;
            assert!((gr(x, Point::new(1.0, 0.0)) - expect).norm() < 1e-13);
            assert!(gn(Point::new(0.4, 1.0), Point::new(0.0, 1.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn scattering_conditions() {
        let soft = make_scattering::<f64>(ScatteringKind::SoundSoft, SolutionTag::U0, 15.0);
        assert_eq!(soft.scatterer, BoundaryCondition::Dirichlet);
        let hard = make_scattering::<f64>(ScatteringKind::SoundHard, SolutionTag::U4, 15.0);
        assert_eq!(hard.scatterer, BoundaryCondition::Neumann);
        assert_eq!((hard.g_n)(Point::new(0.0, 1.5), Point::new(-1.0, 0.0)), cplx(0.0, 0.0));
    }
}
