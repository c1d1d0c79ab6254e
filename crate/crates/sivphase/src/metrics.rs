//! Distances modulo global phase and stability checks.
//!
//! Reconstruction is only possible up to one unimodular factor, so errors are
//! measured in the quotient metric `min_{|tau| = 1} sup_t |f(t) - tau g(t)|`.
//! The stability checks compare this against the spectrogram-side mixed norm
//! `|| |Gf|^2 - |Gg|^2 ||_{beta/2, inf}` through the lattice stability
//! constant `C(sigma, beta)`: locally on each partition interval, and
//! globally on `[p_1 - r, p_J + r]` with the `gamma`-dependent constant.
//! The pairs `f = T_{beta n} phi + T_{-beta n} phi`, `g = T_{beta n} phi -
//! T_{-beta n} phi` witness that no such inequality can hold without a
//! partition: their spectrograms coalesce super-exponentially in `n` while
//! the signals stay apart.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::GaussianModel;
use crate::reconstruct::Partition;
use crate::sampling::{mixed_norm, PNorm};
use crate::signal::SIVSignal;
use crate::special::stability_constant;

/// Result of a quotient-metric evaluation: the distance and the minimizing
/// unimodular factor.
#[derive(Debug, Clone, Copy)]
pub struct QuotientDistance {
    pub distance: f64,
    pub tau: Complex64,
}

/// `min_{|tau| = 1} max_i |f(t_i) - tau g(t_i)|` on the grid
/// `t_i = lo, lo + step, ..., hi`: a coarse scan over 3600 phases followed by
/// golden-section refinement to phase resolution 1e-8.
pub fn quotient_distance<F, G>(f: F, g: G, lo: f64, hi: f64, step: f64) -> QuotientDistance
where
    F: Fn(f64) -> Complex64,
    G: Fn(f64) -> Complex64,
{
    assert!(step > 0.0 && hi >= lo, "bad quotient-distance grid");
    let count = ((hi - lo) / step).round() as usize;
    let mut fs = Vec::with_capacity(count + 1);
    let mut gs = Vec::with_capacity(count + 1);
    for i in 0..=count {
        let t = lo + i as f64 * step;
        fs.push(f(t));
        gs.push(g(t));
    }
    let objective = |theta: f64| -> f64 {
        let tau = Complex64::from_polar(1.0, theta);
        fs.iter()
            .zip(gs.iter())
            .map(|(fv, gv)| (fv - tau * gv).norm())
            .fold(0.0, f64::max)
    };

    let scan = 3600usize;
    let mut best_theta = 0.0;
    let mut best = f64::INFINITY;
    for i in 0..scan {
        let theta = 2.0 * PI * i as f64 / scan as f64;
        let v = objective(theta);
        if v < best {
            best = v;
            best_theta = theta;
        }
    }
    // golden-section refinement around the coarse minimizer
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = best_theta - 2.0 * PI / scan as f64;
    let mut b = best_theta + 2.0 * PI / scan as f64;
    let mut c = b - golden * (b - a);
    let mut d = a + golden * (b - a);
    let mut fc = objective(c);
    let mut fd = objective(d);
    while b - a > 1e-8 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = objective(d);
        }
    }
    let theta = 0.5 * (a + b);
    let refined = objective(theta);
    if refined < best {
        best = refined;
        best_theta = theta;
    }
    QuotientDistance { distance: best, tau: Complex64::from_polar(1.0, best_theta) }
}

/// The closed-form reconstruction error bound
/// `32 max{1, |f|_sup^2} / min{gamma, gamma^5} (eps + eps^2)` per partition
/// interval.
pub fn reconstruction_error_bound(eps: f64, gamma: f64, f_sup: f64) -> f64 {
    32.0 * f_sup.powi(2).max(1.0) / gamma.min(gamma.powi(5)) * (eps + eps * eps)
}

fn sup_on_grid<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, step: f64) -> f64 {
    let count = ((hi - lo) / step).ceil() as usize;
    let mut sup = 0.0f64;
    for i in 0..=count {
        sup = sup.max(f(lo + i as f64 * step));
    }
    sup.max(f(hi))
}

/// One partition interval of the local stability check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntervalCheck {
    pub point: f64,
    /// `sup_{|t - p_j| <= r} |f(t) - tau_j g(t)|` with the modulus-matched
    /// local phase `tau_j`.
    pub lhs: f64,
    pub rhs: f64,
}

/// Local stability report: the modulus-difference inequality and the
/// per-interval phase-aligned inequalities.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub mixed_norm: f64,
    pub stability_constant: f64,
    /// `sup_t | |f(t)|^2 - |g(t)|^2 |`.
    pub modulus_lhs: f64,
    /// `sqrt(2) * mixed_norm * C(sigma, beta)`.
    pub modulus_rhs: f64,
    pub intervals: Vec<IntervalCheck>,
}

impl StabilityReport {
    pub fn holds(&self) -> bool {
        self.modulus_lhs <= self.modulus_rhs
            && self.intervals.iter().all(|iv| iv.lhs <= iv.rhs)
    }
}

/// Check the modulus-difference inequality
/// `|| |f|^2 - |g|^2 ||_inf <= sqrt(2) || |Gf|^2 - |Gg|^2 ||_{beta/2, inf}
/// C(sigma, beta)` and its per-interval phase-aligned refinement with
/// `tau_j = conj(g(p_j)) |f(p_j)| / (|g(p_j)| conj(f(p_j)))` and constant
/// `c_j = (e^{r^2/(4 sigma^2)} + |f|_{I_j} / (|f(p_j)| + |g(p_j)|)) / |g(p_j)|`.
pub fn local_stability_check(
    f: &SIVSignal,
    g: &SIVSignal,
    partition: &Partition,
    quad_tol: f64,
    grid_step: f64,
) -> Result<StabilityReport> {
    if !(grid_step > 0.0) {
        return Err(Error::Argument(format!("grid_step must be positive, got {grid_step}")));
    }
    let model = f.model;
    let c_stab = stability_constant(&model)?;
    let mixed = mixed_norm(f, g, model.beta / 2.0, PNorm::Inf, quad_tol)?;
    let pad = 6.0 * model.sigma;
    let lo = f.extent().0.min(g.extent().0) - pad;
    let hi = f.extent().1.max(g.extent().1) + pad;
    let modulus_lhs =
        sup_on_grid(|t| (f.eval(t).norm_sqr() - g.eval(t).norm_sqr()).abs(), lo, hi, grid_step);
    let modulus_rhs = std::f64::consts::SQRT_2 * mixed * c_stab;

    let r = partition.r;
    let amp = (r * r / (4.0 * model.sigma * model.sigma)).exp();
    let mut intervals = Vec::with_capacity(partition.len());
    for &p in &partition.points {
        let fp = f.eval(p);
        let gp = g.eval(p);
        if fp.norm() == 0.0 || gp.norm() == 0.0 {
            return Err(Error::Hypothesis(format!(
                "local stability needs |f(p)|, |g(p)| > 0 at p = {p}"
            )));
        }
        let tau = gp.conj() * fp.norm() / (gp.norm() * fp.conj());
        let f_sup_interval = sup_on_grid(|t| f.eval(t).norm(), p - r, p + r, grid_step);
        let cj = (amp + f_sup_interval / (fp.norm() + gp.norm())) / gp.norm();
        let lhs = sup_on_grid(|t| (f.eval(t) - tau * g.eval(t)).norm(), p - r, p + r, grid_step);
        let rhs = cj * std::f64::consts::SQRT_2 * mixed * c_stab;
        intervals.push(IntervalCheck { point: p, lhs, rhs });
    }
    Ok(StabilityReport {
        mixed_norm: mixed,
        stability_constant: c_stab,
        modulus_lhs,
        modulus_rhs,
        intervals,
    })
}

/// Global stability report on `I = [p_1 - r, p_J + r]`. The right-hand side
/// is reported both with the stability constant to the first power and, as a
/// weaker certified fallback, to the second.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GlobalStabilityReport {
    /// `min_tau sup_I |f - tau g|`.
    pub lhs: f64,
    pub rhs_linear: f64,
    pub rhs_quadratic: f64,
    pub mixed_norm: f64,
    pub stability_constant: f64,
}

/// Check the global inequality
///
/// ```text
/// min_tau || f - tau g ||_{L_inf(I)} <= (32 sqrt(2) / 3) C (J-1)
///     e^{r^2/(4 sigma^2)} max{|f|^2, |f| + |g|} / min{gamma, gamma^3}
///     || |Gf|^2 - |Gg|^2 ||_{beta/2, inf}
/// ```
///
/// over `I = [p_1 - r, p_J + r]`, with sup norms taken on `I`.
pub fn global_stability_check(
    f: &SIVSignal,
    g: &SIVSignal,
    partition: &Partition,
    quad_tol: f64,
    grid_step: f64,
) -> Result<GlobalStabilityReport> {
    if !(grid_step > 0.0) {
        return Err(Error::Argument(format!("grid_step must be positive, got {grid_step}")));
    }
    let model = f.model;
    let c_stab = stability_constant(&model)?;
    let mixed = mixed_norm(f, g, model.beta / 2.0, PNorm::Inf, quad_tol)?;
    let r = partition.r;
    let gamma = partition.gamma;
    let lo = partition.points[0] - r;
    let hi = partition.points[partition.len() - 1] + r;
    let lhs = quotient_distance(|t| f.eval(t), |t| g.eval(t), lo, hi, grid_step).distance;
    let f_sup = sup_on_grid(|t| f.eval(t).norm(), lo, hi, grid_step);
    let g_sup = sup_on_grid(|t| g.eval(t).norm(), lo, hi, grid_step);
    let base = (32.0 * std::f64::consts::SQRT_2 / 3.0)
        * (partition.len() as f64 - 1.0)
        * (r * r / (4.0 * model.sigma * model.sigma)).exp()
        * (f_sup * f_sup).max(f_sup + g_sup)
        / gamma.min(gamma.powi(3))
        * mixed;
    Ok(GlobalStabilityReport {
        lhs,
        rhs_linear: base * c_stab,
        rhs_quadratic: base * c_stab * c_stab,
        mixed_norm: mixed,
        stability_constant: c_stab,
    })
}

/// The instability witnesses `f = T_{beta n} phi + T_{-beta n} phi` and
/// `g = T_{beta n} phi - T_{-beta n} phi`.
pub fn instability_pair(model: GaussianModel, n: usize) -> (SIVSignal, SIVSignal) {
    let len = 2 * n + 1;
    let mut plus = vec![Complex64::new(0.0, 0.0); len];
    let mut minus = vec![Complex64::new(0.0, 0.0); len];
    plus[2 * n] = Complex64::new(1.0, 0.0);
    minus[2 * n] = Complex64::new(1.0, 0.0);
    plus[0] = Complex64::new(1.0, 0.0);
    minus[0] = Complex64::new(-1.0, 0.0);
    (
        SIVSignal::new(model, -(n as i64), plus).expect("valid witness"),
        SIVSignal::new(model, -(n as i64), minus).expect("valid witness"),
    )
}

/// Quotient distance between the instability witnesses divided by their
/// mixed norm; grows super-exponentially in `n`, witnessing that global
/// stability without a partition is impossible.
pub fn instability_ratio(model: GaussianModel, n: usize, quad_tol: f64) -> Result<f64> {
    let (f, g) = instability_pair(model, n);
    let mixed = mixed_norm(&f, &g, model.beta / 2.0, PNorm::Inf, quad_tol)?;
    if mixed == 0.0 {
        return Err(Error::Domain(format!(
            "mixed norm of the order-{n} witnesses underflowed to zero"
        )));
    }
    let radius = model.beta * n as f64 + 6.0 * model.sigma;
    let dist = quotient_distance(|t| f.eval(t), |t| g.eval(t), -radius, radius, 0.02).distance;
    Ok(dist / mixed)
}
