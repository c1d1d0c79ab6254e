//! Jacobi theta machinery behind the dual generators.
//!
//! The third Jacobi theta function `theta3(z, c) = sum_n c^{n^2} e^{2inz}`
//! controls the Riesz bounds of Gaussian translates, and the Fourier
//! coefficients `a_n` of its reciprocal give the dual generator as a finite
//! Gaussian mixture:
//!
//! ```text
//! 1 / theta3(pi beta_g t, c) = sum_n a_n e^{2 pi i beta_g n t},
//! a_n = (-1)^n (2/xi) sum_{m>=0} (-1)^m c^{(m+1/2)(2|n|+m+1/2)},
//! xi  = sum_n (-1)^n (2n+1) c^{(n+1/2)^2},
//! ```
//!
//! with nome `c = exp(-beta_g^2 / (4 sigma_g^2))`. This module evaluates the
//! series, builds the coefficient table, and derives the decay envelope
//! `|Finv Lambda(t)| <= K e^{-nu |t|}` and the lattice stability constant
//! `C(sigma, beta) = sup_p sum_n |Finv Lambda(p - (beta/2) n)|`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::GaussianModel;

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

fn check_nome(c: f64) -> Result<()> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("theta nome must lie in (0,1), got {c}")));
    }
    Ok(())
}

/// `theta3(z, c) = sum_{n in Z} c^{n^2} e^{2inz}` for complex `z`, truncated
/// when the term envelope `2 c^{n^2} e^{2n |Im z|}` drops below `tol` times
/// the partial sum.
pub fn theta3(z: Complex64, c: f64, tol: f64) -> Result<Complex64> {
    check_nome(c)?;
    if !(tol > 0.0) {
        return Err(Error::Argument(format!("theta3 tolerance must be positive, got {tol}")));
    }
    if z.im == 0.0 {
        return Ok(Complex64::new(theta3_real_tol(z.re, c, tol), 0.0));
    }
    let mut sum = Complex64::new(1.0, 0.0);
    let im = z.im.abs();
    for n in 1..=400i32 {
        let q = c.powi(n * n);
        let term = q * ((Complex64::i() * 2.0 * n as f64 * z).exp()
            + (-Complex64::i() * 2.0 * n as f64 * z).exp());
        sum += term;
        let envelope = 2.0 * q * (2.0 * n as f64 * im).exp();
        if envelope < tol * sum.norm().max(f64::MIN_POSITIVE) && n >= 2 {
            return Ok(sum);
        }
    }
    Err(Error::Domain(format!(
        "theta3 series did not converge for c = {c}, |Im z| = {im}"
    )))
}

/// `theta3` on the real axis via the cosine form `1 + 2 sum c^{n^2} cos(2nt)`,
/// summed to machine precision.
pub fn theta3_real(t: f64, c: f64) -> f64 {
    theta3_real_tol(t, c, 1e-15)
}

fn theta3_real_tol(t: f64, c: f64, tol: f64) -> f64 {
    let mut sum = 1.0;
    for n in 1..=400i32 {
        let q = c.powi(n * n);
        sum += 2.0 * q * (2.0 * n as f64 * t).cos();
        if 2.0 * q < tol * sum.abs().max(f64::MIN_POSITIVE) && n >= 2 {
            break;
        }
    }
    sum
}

/// `xi(c) = sum_{n in Z} (-1)^n (2n+1) c^{(n+1/2)^2}`.
///
/// The terms at `n` and `-(n+1)` coincide, so the sum equals twice the sum
/// over `n >= 0`.
pub fn xi(c: f64) -> Result<f64> {
    check_nome(c)?;
    let mut sum = 0.0;
    for n in 0..=400i32 {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let e = (n as f64 + 0.5) * (n as f64 + 0.5);
        let term = sign * (2.0 * n as f64 + 1.0) * c.powf(e);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(f64::MIN_POSITIVE) && n >= 2 {
            break;
        }
    }
    Ok(2.0 * sum)
}

/// Envelope bound `|K e^{-nu |t|}|` for the inverse Fourier transform of the
/// damped reciprocal theta function `Lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayConstants {
    pub k: f64,
    pub nu: f64,
    /// False when the constants are the certified closed-form pair
    /// `(205/sigma, 1/4)` of the explicit regime; true when they were fitted
    /// numerically to the mixture tail.
    pub fitted: bool,
}

/// Nome `c`, the constant `xi(c)`, and the truncated reciprocal-theta Fourier
/// coefficients for the dual generator of `phi^{sigma_g}` on `beta_g * Z`.
#[derive(Debug, Clone)]
pub struct DualGeneratorTable {
    pub sigma_g: f64,
    pub beta_g: f64,
    pub c: f64,
    pub xi: f64,
    /// `a_n` for `n = 0 ..= M`; `a_{-n} = a_n`.
    coeffs: Vec<f64>,
    pub tail_tol: f64,
}

impl DualGeneratorTable {
    /// Build the table for the generator `phi^{sigma_g}` on lattice
    /// `beta_g * Z`. The truncation index `M` is the smallest index whose
    /// coefficient envelope `(2/|xi|) c^M (c^{1/4} + (sigma_g/beta_g) sqrt(2 pi))`
    /// falls below `tail_tol`.
    pub fn build(sigma_g: f64, beta_g: f64, tail_tol: f64) -> Result<Self> {
        if !(sigma_g > 0.0 && beta_g > 0.0) {
            return Err(Error::Argument(format!(
                "generator parameters must be positive, got sigma_g = {sigma_g}, beta_g = {beta_g}"
            )));
        }
        if !(tail_tol > 0.0) {
            return Err(Error::Argument(format!("tail_tol must be positive, got {tail_tol}")));
        }
        let c = (-beta_g * beta_g / (4.0 * sigma_g * sigma_g)).exp();
        check_nome(c)?;
        let xi_c = xi(c)?;
        if xi_c == 0.0 {
            return Err(Error::Domain(format!("xi({c}) vanished; reciprocal theta undefined")));
        }
        let envelope_factor = (2.0 / xi_c.abs()) * (c.powf(0.25) + (sigma_g / beta_g) * SQRT_2PI);
        let mut m_max = 0usize;
        while envelope_factor * c.powi(m_max as i32) >= tail_tol {
            m_max += 1;
            if m_max > 100_000 {
                return Err(Error::Domain(format!(
                    "coefficient envelope does not reach tail_tol = {tail_tol} for c = {c}"
                )));
            }
        }
        let coeffs = (0..=m_max).map(|n| recip_theta_coeff(c, xi_c, n)).collect();
        Ok(Self { sigma_g, beta_g, c, xi: xi_c, coeffs, tail_tol })
    }

    /// Largest retained coefficient index `M`.
    pub fn max_index(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `a_n` (zero beyond the truncation index).
    #[inline]
    pub fn coeff(&self, n: i64) -> f64 {
        let idx = n.unsigned_abs() as usize;
        if idx < self.coeffs.len() {
            self.coeffs[idx]
        } else {
            0.0
        }
    }

    /// Certified envelope `(2/|xi|) c^{|n|} (c^{1/4} + (sigma_g/beta_g) sqrt(2 pi))`
    /// on the coefficient moduli.
    pub fn coeff_envelope(&self, n: i64) -> f64 {
        (2.0 / self.xi.abs())
            * self.c.powi(n.unsigned_abs() as i32)
            * (self.c.powf(0.25) + (self.sigma_g / self.beta_g) * SQRT_2PI)
    }

    /// `Finv Lambda(t) = (1/(sigma_g sqrt(2 pi))) sum_n a_n phi^{sigma_g}(t + beta_g n)`,
    /// the inverse Fourier transform of the damped reciprocal theta function.
    pub fn finv_lambda(&self, t: f64) -> f64 {
        let m = self.max_index() as i64;
        // Each Gaussian term is negligible more than ~9 sigma from its
        // center, so only lattice indices near -t/beta_g contribute.
        let half_width = (9.0 * self.sigma_g / self.beta_g).ceil() as i64 + 1;
        let center = (-t / self.beta_g).round() as i64;
        let lo = (center - half_width).max(-m);
        let hi = (center + half_width).min(m);
        if lo > hi {
            return 0.0;
        }
        let inv_two_var = 1.0 / (2.0 * self.sigma_g * self.sigma_g);
        let mut sum = 0.0;
        for n in lo..=hi {
            let u = t + self.beta_g * n as f64;
            let e = -u * u * inv_two_var;
            if e > -745.0 {
                sum += self.coeff(n) * e.exp();
            }
        }
        sum / (self.sigma_g * SQRT_2PI)
    }

    /// The dual generator `phi~ = sqrt(2) Finv Lambda` of `phi^{sigma_g}` on
    /// `beta_g * Z`.
    pub fn dual_eval(&self, t: f64) -> f64 {
        std::f64::consts::SQRT_2 * self.finv_lambda(t)
    }

    /// Radius beyond which the mixture is below the tail tolerance.
    pub fn effective_radius(&self) -> f64 {
        self.beta_g * (self.max_index() as f64 + 1.0) + 9.0 * self.sigma_g
    }
}

fn recip_theta_coeff(c: f64, xi_c: f64, n: usize) -> f64 {
    let two_n = 2.0 * n as f64;
    let mut inner = 0.0;
    for m in 0..=2000i32 {
        let mf = m as f64;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * c.powf((mf + 0.5) * (two_n + mf + 0.5));
        inner += term;
        if term.abs() < 1e-18 * inner.abs().max(f64::MIN_POSITIVE) && m >= 2 {
            break;
        }
    }
    let sign_n = if n % 2 == 0 { 1.0 } else { -1.0 };
    sign_n * (2.0 / xi_c) * inner
}

/// Convenience constructor mirroring [`DualGeneratorTable::build`].
pub fn dual_generator_mixture(sigma_g: f64, beta_g: f64, tail_tol: f64) -> Result<DualGeneratorTable> {
    DualGeneratorTable::build(sigma_g, beta_g, tail_tol)
}

impl GaussianModel {
    /// Dual-generator table for the tensor products: generator
    /// `phi^{sigma/sqrt(2)}` on lattice `(beta/2) Z`, nome
    /// `c = exp(-beta^2/(8 sigma^2))`.
    pub fn tensor_dual_table(&self, tail_tol: f64) -> Result<DualGeneratorTable> {
        DualGeneratorTable::build(self.sigma / std::f64::consts::SQRT_2, self.beta / 2.0, tail_tol)
    }
}

/// `phi~_omega(t) = sqrt(2) e^{+omega^2/(4 sigma^2)} Finv Lambda(t - omega/2)`,
/// the dual generator of the tensor-product system `(T_{(beta/2) n} phi_omega)_n`.
///
/// The primal window `phi_omega` carries the damping weight
/// `e^{-omega^2/(4 sigma^2)}`, so the dual carries its reciprocal and the
/// biorthogonality `<T_m phi~_omega, T_n phi_omega> = delta_{mn}` holds with
/// no omega-dependent factor. `table` must be the tensor table of `model`
/// (generator `sigma/sqrt(2)`, lattice step `beta/2`).
pub fn dual_tensor_eval(t: f64, omega: f64, model: &GaussianModel, table: &DualGeneratorTable) -> f64 {
    debug_assert!((table.sigma_g - model.sigma / std::f64::consts::SQRT_2).abs() < 1e-12);
    debug_assert!((table.beta_g - model.beta / 2.0).abs() < 1e-12);
    std::f64::consts::SQRT_2
        * (omega * omega / (4.0 * model.sigma * model.sigma)).exp()
        * table.finv_lambda(t - omega / 2.0)
}

/// Decay envelope of `Finv Lambda` for the tensor table of `model`.
///
/// In the explicit regime the certified pair `(205/sigma, 1/4)` is returned.
/// Outside it, `nu` comes from a log-linear fit of the per-unit-interval
/// maxima of `|Finv Lambda|` on `[5, 30]` and `K` from the grid maximum of
/// `|Finv Lambda(t)| e^{nu |t|}` on `[0, 30]`, flagged `fitted`.
pub fn decay_constants(model: &GaussianModel) -> Result<DecayConstants> {
    if model.explicit_regime() {
        return Ok(DecayConstants { k: 205.0 / model.sigma, nu: 0.25, fitted: false });
    }
    let table = model.tensor_dual_table(1e-12)?;
    Ok(fit_decay(&table))
}

/// Log-linear envelope fit on the mixture tail (used for truncation radii
/// even in the explicit regime, where the certified envelope is very loose).
pub(crate) fn fit_decay(table: &DualGeneratorTable) -> DecayConstants {
    let mut points = Vec::new();
    let step = 0.01;
    for interval in 5..30 {
        let lo = interval as f64;
        let mut max_abs = 0.0f64;
        let mut t = lo;
        while t < lo + 1.0 {
            max_abs = max_abs.max(table.finv_lambda(t).abs());
            t += step;
        }
        if max_abs > 1e-300 {
            points.push((lo + 0.5, max_abs.ln()));
        }
    }
    let nu = if points.len() >= 2 {
        let n = points.len() as f64;
        let sx: f64 = points.iter().map(|p| p.0).sum();
        let sy: f64 = points.iter().map(|p| p.1).sum();
        let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        (-slope).max(1e-3)
    } else {
        // The mixture already underflowed past t = 5; any modest rate works.
        1.0
    };
    let mut k = 0.0f64;
    let mut t = 0.0;
    while t <= 30.0 {
        k = k.max(table.finv_lambda(t).abs() * (nu * t).exp());
        t += step;
    }
    DecayConstants { k: k * 1.000_001, nu, fitted: true }
}

/// Riesz lower bound `A(sigma, beta, omega) = (sigma/sqrt(2)) phi(omega)
/// theta3(pi/2, phi(beta/2))` of the tensor-product system.
pub fn riesz_lower_bound(model: &GaussianModel, omega: f64) -> f64 {
    (model.sigma / std::f64::consts::SQRT_2)
        * model.window(omega)
        * theta3_real(PI / 2.0, model.tensor_nome())
}

/// The 1-periodization `Phi_beta(t) = sigma beta sqrt(pi) theta3(pi t, phi(beta/sqrt(2)))`
/// of `|phi^|^2` used in the Riesz-basis condition `beta A <= Phi_beta <= beta B`.
pub fn periodization(model: &GaussianModel, t: f64) -> f64 {
    model.sigma * model.beta * PI.sqrt() * theta3_real(PI * t, model.generator_nome())
}

/// Exact Riesz bounds `(A, B)` of the Gaussian translate system on `beta Z`:
/// the theta factor attains its minimum at `pi/2` and maximum at `0`.
pub fn riesz_bounds(model: &GaussianModel) -> (f64, f64) {
    let c = model.generator_nome();
    let scale = model.sigma * PI.sqrt();
    (scale * theta3_real(PI / 2.0, c), scale * theta3_real(0.0, c))
}

/// Stability constant `C(sigma, beta) = sup_p sum_n |Finv Lambda(p - (beta/2) n)|`
/// on the default 10^4-point period grid.
pub fn stability_constant(model: &GaussianModel) -> Result<f64> {
    stability_constant_with_grid(model, 10_000)
}

/// As [`stability_constant`] with an explicit grid resolution. The summand is
/// `beta/2`-periodic in `p`, so the supremum is taken over one period; the
/// reported value adds the lattice truncation bound and a Lipschitz slack for
/// the grid.
pub fn stability_constant_with_grid(model: &GaussianModel, grid_points: usize) -> Result<f64> {
    if grid_points == 0 {
        return Err(Error::Argument("grid_points must be positive".into()));
    }
    let table = model.tensor_dual_table(1e-12)?;
    let period = model.beta / 2.0;
    let env = if model.explicit_regime() {
        DecayConstants { k: 205.0 / model.sigma, nu: 0.25, fitted: false }
    } else {
        fit_decay(&table)
    };
    // Truncation radius with tail sum below 1e-12 under K e^{-nu |t|}.
    let denom = 1.0 - (-env.nu * period).exp();
    let tail_target = 1e-12;
    let radius = ((2.0 * env.k / (tail_target * denom)).ln() / env.nu).max(table.effective_radius());
    let tail = 2.0 * env.k * (-env.nu * radius).exp() / denom;

    let step = period / grid_points as f64;
    let mut sup = 0.0f64;
    let n_half = (radius / period).ceil() as i64 + 1;
    for i in 0..=grid_points {
        let p = i as f64 * step;
        let mut sum = 0.0;
        for n in -n_half..=n_half {
            sum += table.finv_lambda(p - period * n as f64).abs();
        }
        sup = sup.max(sum);
    }
    // Lipschitz slack: each mixture term has |d/dt| <= sum|a_i| e^{-1/2} /
    // (sigma_g^2 sqrt(2 pi)); the lattice sum stacks at most 2*n_half+1 terms.
    let coeff_abs_sum: f64 = (-(table.max_index() as i64)..=(table.max_index() as i64))
        .map(|n| table.coeff(n).abs())
        .sum();
    let lip_single = coeff_abs_sum * (-0.5f64).exp() / (table.sigma_g * table.sigma_g * SQRT_2PI);
    let slack = (2 * n_half + 1) as f64 * lip_single * step / 2.0;
    Ok(sup + tail + slack)
}
