//! Quadrature: adaptive Simpson integration and the trapezoidal rule.
//!
//! The trapezoidal rule `I_h^H(W) = h * sum_{k=-H}^{H} W(hk)` converges
//! exponentially in `1/h` for integrands analytic in a strip around the real
//! axis, which is why it is the quadrature of choice for spectrogram slices.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson integration of a complex-valued integrand on `[a, b]`
/// to absolute tolerance `tol`.
pub fn adaptive_simpson_complex<F>(f: F, a: f64, b: f64, tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if !(tol > 0.0) {
        return Err(Error::Argument(format!("quadrature tolerance must be positive, got {tol}")));
    }
    if a >= b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson_step(a, b, fa, fm, fb);
    // Seed the recursion on a few panels so oscillatory integrands cannot
    // fool the first error estimate.
    let panels = 8;
    let mut total = Complex64::new(0.0, 0.0);
    let step = (b - a) / panels as f64;
    for i in 0..panels {
        let lo = a + i as f64 * step;
        let hi = lo + step;
        let flo = f(lo);
        let fhi = f(hi);
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        let s = simpson_step(lo, hi, flo, fmid, fhi);
        total += simpson_recurse(&f, lo, hi, flo, fmid, fhi, s, tol / panels as f64, MAX_DEPTH)?;
    }
    let _ = whole;
    Ok(total)
}

/// Adaptive Simpson integration of a real-valued integrand on `[a, b]`.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let v = adaptive_simpson_complex(|t| Complex64::new(f(t), 0.0), a, b, tol)?;
    Ok(v.re)
}

#[inline]
fn simpson_step(a: f64, b: f64, fa: Complex64, fm: Complex64, fb: Complex64) -> Complex64 {
    (fa + 4.0 * fm + fb) * ((b - a) / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_step(a, m, fa, flm, fm);
    let right = simpson_step(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.norm() <= 15.0 * tol || (b - a) < 1e-14 {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureFailed(format!(
            "max subdivision depth reached on [{a}, {b}], residual {:.3e} > tol {:.3e}",
            delta.norm(),
            15.0 * tol
        )));
    }
    let l = simpson_recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?;
    let r = simpson_recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?;
    Ok(l + r)
}

/// Trapezoidal rule `h * sum_{k=-H}^{H} W(hk)`.
///
/// With `half_count = Some(H)` the sum is over exactly `2H+1` nodes. With
/// `None`, the sum extends outward in both directions until ten consecutive
/// node values fall below `1e-16` times the running maximum modulus (a proxy
/// for the doubly infinite sum).
pub fn trapezoid<F>(w: F, h: f64, half_count: Option<usize>) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    debug_assert!(h > 0.0);
    match half_count {
        Some(cap) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in -(cap as i64)..=(cap as i64) {
                acc += w(h * k as f64);
            }
            acc * h
        }
        None => {
            let center = w(0.0);
            let mut acc = center;
            let mut running_max = center.norm().max(f64::MIN_POSITIVE);
            for dir in [1i64, -1] {
                let mut small_streak = 0u32;
                let mut k = dir;
                loop {
                    let v = w(h * k as f64);
                    acc += v;
                    let n = v.norm();
                    if n > running_max {
                        running_max = n;
                        small_streak = 0;
                    } else if n < 1e-16 * running_max {
                        small_streak += 1;
                        if small_streak >= 10 {
                            break;
                        }
                    } else {
                        small_streak = 0;
                    }
                    k += dir;
                    if k.unsigned_abs() > 100_000_000 {
                        break;
                    }
                }
            }
            acc * h
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn simpson_polynomial_exact() {
        let v = adaptive_simpson(|t| 3.0 * t * t, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 8.0).abs() < 1e-10);
    }

    #[test]
    fn simpson_complex_oscillatory() {
        // integral of e^{2 pi i t} over one period is 0
        let v = adaptive_simpson_complex(
            |t| Complex64::new(0.0, 2.0 * PI * t).exp(),
            0.0,
            1.0,
            1e-12,
        )
        .unwrap();
        assert!(v.norm() < 1e-10);
    }

    #[test]
    fn simpson_rejects_bad_tol() {
        assert!(adaptive_simpson(|_| 1.0, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn trapezoid_zero_function() {
        let v = trapezoid(|_| Complex64::new(0.0, 0.0), 0.1, None);
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn trapezoid_gaussian_infinite_proxy() {
        // integral of exp(-t^2/2)/sqrt(2 pi) is 1; trapezoid error for a
        // Gaussian is far below machine precision at h = 0.5
        let norm = 1.0 / (2.0 * PI).sqrt();
        let v = trapezoid(
            |t| Complex64::new(norm * (-0.5 * t * t).exp(), 0.0),
            0.5,
            None,
        );
        assert!((v.re - 1.0).abs() < 1e-12, "got {}", v.re);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn trapezoid_finite_matches_manual_sum() {
        let f = |t: f64| Complex64::new(1.0 / (1.0 + t * t), 0.0);
        let v = trapezoid(f, 0.25, Some(3));
        let mut manual = Complex64::new(0.0, 0.0);
        for k in -3i64..=3 {
            manual += f(0.25 * k as f64);
        }
        manual *= 0.25;
        assert!((v - manual).norm() < 1e-15);
    }
}
