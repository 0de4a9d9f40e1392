//! Adaptive quadrature for prior-shape integrals.
//!
//! Adaptive Simpson with the usual Richardson error estimate. Infinite upper
//! limits are mapped to [0, 1) by the rational substitution
//! `x = a + t/(1-t)`, which keeps exponential-type tails integrable.

use crate::error::{Error, Result};
use crate::math;

const MAX_DEPTH: u32 = 48;

#[inline]
fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let err = left + right - whole;
    if math::abs(err) <= 15.0 * tol {
        return Ok(left + right + err / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureNonConvergence);
    }
    let l = adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

/// Integrate `f` over the finite interval `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(b > a) {
        return Ok(0.0);
    }
    let guard = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (guard(a), guard(m), guard(b));
    let whole = simpson(fa, fm, fb, b - a);
    adapt(&guard, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

/// Integrate `f` over `[a, +inf)` to absolute tolerance `tol`.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> Result<f64> {
    // x = a + t/(1-t), dx = dt/(1-t)^2
    integrate(
        move |t| {
            let one_minus = 1.0 - t;
            if one_minus <= 0.0 {
                return 0.0;
            }
            let x = a + t / one_minus;
            f(x) / (one_minus * one_minus)
        },
        0.0,
        1.0,
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x * x, 0.0, 3.0, 1e-12).unwrap();
        assert!((v - 9.0).abs() < 1e-10);
    }

    #[test]
    fn kinked_integrand_converges() {
        // triangle density on [0,2]
        let v = integrate(|x| if x < 1.0 { x } else { 2.0 - x }, 0.0, 2.0, 1e-10).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn half_line_exponential() {
        let v = integrate_half_line(|x| math::exp(-x), 0.0, 1e-10).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn half_line_exponential_mean() {
        let v = integrate_half_line(|x| x * math::exp(-x), 0.0, 1e-10).unwrap();
        assert!((v - 1.0).abs() < 1e-8);
    }
}
