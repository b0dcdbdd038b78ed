//! Floating-point scalar abstraction shared by the numerical modules.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point types the analytic core is generic over.
///
/// Tolerances throughout the crate are written as `f64` literals tuned for
/// double precision. [`Scalar::tol`] converts them and widens them to a
/// small multiple of the type's machine epsilon, so the same code runs in
/// `f32` with correspondingly looser checks.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant, panicking only for non-representable input.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// A tolerance of `x` in double precision, never tighter than 64 ulps of one.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(64.0))
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn from_int(n: i64) -> Self {
        <Self as FromPrimitive>::from_i64(n).expect("i64 representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `x^n` by repeated squaring.
pub fn powu<T: Scalar>(x: T, mut n: u64) -> T {
    let mut base = x;
    let mut acc = T::one();
    while n > 0 {
        if n & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        n >>= 1;
    }
    acc
}

/// Error-free sum: `a + b = s + e` exactly.
#[inline]
pub(crate) fn two_sum<T: Scalar>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free product via fused multiply-add: `a * b = p + e` exactly.
#[inline]
pub(crate) fn two_prod<T: Scalar>(a: T, b: T) -> (T, T) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// Compensated Horner evaluation of `Σ coeffs[i] x^i`, highest power first.
///
/// Returns the polynomial value with roughly twice working precision
/// accuracy before the final rounding.
pub(crate) fn compensated_horner<T: Scalar>(coeffs: &[T], x: T) -> T {
    let Some((&last, rest)) = coeffs.split_last() else {
        return T::zero();
    };
    let mut s = last;
    let mut c = T::zero();
    for &a in rest.iter().rev() {
        let (p, pi) = two_prod(s, x);
        let (sum, sigma) = two_sum(p, a);
        s = sum;
        c = c.mul_add(x, pi + sigma);
    }
    s + c
}
