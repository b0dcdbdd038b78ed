//! Bracketed scalar root finding and one-dimensional convex minimization.

use crate::error::Error;
use crate::scalar::Scalar;

const MAX_ITER: usize = 200;

/// Brent's method on a sign-changing bracket `[a, b]`.
///
/// Mixes inverse quadratic interpolation and secant steps with bisection
/// fallback; terminates when the bracket is narrower than `xtol` (plus a
/// few ulps of the iterate) or an exact zero is met.
pub fn brent<T, F>(mut f: F, a: T, b: T, xtol: T) -> Result<T, Error>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let half = T::lit(0.5);

    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::RootNotBracketed { lo: a.as_f64(), hi: b.as_f64() });
    }
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if (fa > T::zero()) == (fb > T::zero()) {
        return Err(Error::RootNotBracketed { lo: a.as_f64(), hi: b.as_f64() });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..MAX_ITER {
        if (fb > T::zero()) == (fc > T::zero()) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }

        let tol = two * T::epsilon() * b.abs() + half * xtol;
        let m = half * (c - b);
        if m.abs() <= tol || fb == T::zero() {
            return Ok(b);
        }

        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * m * s;
                q = T::one() - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * m * qa * (qa - r) - (b - a) * (r - T::one()));
                q = (qa - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            } else {
                p = -p;
            }
            let min1 = three * m * q - (tol * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }

        a = b;
        fa = fb;
        b = if d.abs() > tol {
            b + d
        } else if m > T::zero() {
            b + tol
        } else {
            b - tol
        };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::RootNotConverged { at: b.as_f64() });
        }
    }
    Err(Error::RootNotConverged { at: b.as_f64() })
}

/// Sub-intervals of an equispaced grid on `[lo, hi]` over which `f` changes
/// sign (a zero at a grid point counts for the interval it closes).
pub fn sign_changes<T, F>(mut f: F, lo: T, hi: T, points: usize) -> Vec<(T, T)>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let n = points.max(2);
    let step = (hi - lo) / T::from_count(n - 1);
    let mut out = Vec::new();
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    for i in 1..n {
        let x = if i == n - 1 { hi } else { lo + step * T::from_count(i) };
        let fx = f(x);
        let crosses = (f_prev > T::zero() && fx <= T::zero()) || (f_prev < T::zero() && fx >= T::zero());
        if crosses {
            out.push((x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    out
}

/// Golden-section search for the minimizer of a unimodal `f` on `[lo, hi]`.
pub fn golden_min<T, F>(mut f: F, lo: T, hi: T, xtol: T) -> (T, T)
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..MAX_ITER {
        if (b - a).abs() <= xtol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    let (xa, fa, xb, fb) = (lo, f(lo), hi, f(hi));
    [(x1, f1), (x2, f2), (xa, fa), (xb, fb)]
        .into_iter()
        .filter(|(_, v)| !v.is_nan())
        .fold((x1, f1), |best, cand| if cand.1 < best.1 { cand } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_cube_root() {
        let root = brent(|x: f64| x * x * x - 0.5, 0.0, 1.0, 1e-14).unwrap();
        assert!((root - 0.5f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn brent_handles_pole_side_of_bracket() {
        // 0.3/x + 0.7x - 1 has roots 3/7 and 1; bracket the smaller one away from the pole.
        let g = |x: f64| 0.3 / x + 0.7 * x - 1.0;
        let root = brent(g, 0.3, 0.7, 1e-14).unwrap();
        assert!((root - 3.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn brent_rejects_missing_bracket() {
        let err = brent(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::RootNotBracketed { .. }));
    }

    #[test]
    fn brent_returns_exact_endpoint() {
        assert_eq!(brent(|x: f64| x - 2.0, 2.0, 3.0, 1e-12).unwrap(), 2.0);
    }

    #[test]
    fn brent_in_single_precision() {
        let root = brent(|x: f32| x * x - 2.0, 0.0, 2.0, 1e-6).unwrap();
        assert!((root - std::f32::consts::SQRT_2).abs() < 1e-6);
    }

    #[test]
    fn grid_finds_each_crossing() {
        let f = |x: f64| (x - 0.2) * (x - 0.5) * (x - 0.8);
        let brackets = sign_changes(f, 0.0, 1.0, 1024);
        assert_eq!(brackets.len(), 3);
        for ((lo, hi), root) in brackets.iter().zip([0.2, 0.5, 0.8]) {
            assert!(*lo <= root && root <= *hi);
        }
    }

    #[test]
    fn golden_min_of_parabola() {
        let (x, fx) = golden_min(|x: f64| (x - 0.3) * (x - 0.3) + 1.0, 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-15);
    }
}
