use std::fmt::Debug;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar the solver is generic over.
pub trait Real:
    Float + FloatConst + FromPrimitive + faer::traits::RealField + Debug + Send + Sync + 'static
{
    /// Lossy conversion from an f64 literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type C<T> = Complex<T>;

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

/// `e^{i t}` for real `t`.
#[inline]
pub fn cis<T: Real>(t: T) -> C<T> {
    let (s, c) = t.sin_cos();
    Complex::new(c, s)
}

/// `e^z - 1` without cancellation for small `|z|`.
pub fn expm1_c<T: Real>(z: C<T>) -> C<T> {
    let (s, c) = z.im.sin_cos();
    let half = z.im * T::lit(0.5);
    let sh = half.sin();
    let em1 = z.re.exp_m1();
    // e^x cos y - 1 = expm1(x) cos y - 2 sin^2(y/2)
    let re = em1 * c - T::lit(2.0) * sh * sh;
    let im = z.re.exp() * s;
    Complex::new(re, im)
}
