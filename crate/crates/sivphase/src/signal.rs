//! Ground-truth signals and their closed-form transforms.
//!
//! A signal `f = sum_n c_n phi(. - beta n)` with finitely supported complex
//! coefficients has closed-form Gabor transform
//!
//! ```text
//! Gphi(x, t) = sigma sqrt(pi) e^{-x^2/(4 sigma^2)} e^{-pi i x t} e^{-pi^2 sigma^2 t^2},
//! Gf(x, t)   = sum_k c_k e^{-2 pi i beta k t} Gphi(x - beta k, t),
//! ```
//!
//! and its spectrogram factors as `|Gf(x,t)|^2 = pi sigma^2 phi^{sigma'}(t) S_x(t)`
//! with `sigma' = 1/(2 pi sigma)` and a finite trigonometric polynomial
//! `S_x(t) = sum_l b_l(x) e^{pi i beta l t}`. Tensor products
//! `f_omega = (T_omega f) conj(f)` stay in a shift-invariant space on the
//! half lattice. All sums here are exact finite sums; a quadrature-based
//! spectrogram is provided for signals outside the space.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::GaussianModel;
use crate::quad::adaptive_simpson_complex;

/// A signal in the shift-invariant space: finitely supported defining
/// sequence `c_n`, `n = n_min .. n_min + coeffs.len() - 1`.
#[derive(Debug, Clone)]
pub struct SIVSignal {
    pub model: GaussianModel,
    pub n_min: i64,
    pub coeffs: Vec<Complex64>,
    /// Cached `max |c_n|`.
    pub c_inf: f64,
}

impl SIVSignal {
    pub fn new(model: GaussianModel, n_min: i64, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::Argument("signal needs at least one nonzero coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Argument("signal coefficients must be finite".into()));
        }
        let c_inf = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        Ok(Self { model, n_min, coeffs, c_inf })
    }

    pub fn n_max(&self) -> i64 {
        self.n_min + self.coeffs.len() as i64 - 1
    }

    /// Support interval of the coefficient centers on the time axis.
    pub fn extent(&self) -> (f64, f64) {
        (self.model.beta * self.n_min as f64, self.model.beta * self.n_max() as f64)
    }

    /// `f(t) = sum_n c_n phi(t - beta n)`.
    pub fn eval(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            let n = self.n_min + i as i64;
            acc += c * self.model.window(t - self.model.beta * n as f64);
        }
        acc
    }

    /// Closed-form Gabor transform `Gf(x, t)`.
    pub fn gabor_transform(&self, x: f64, t: f64) -> Complex64 {
        let sigma = self.model.sigma;
        let beta = self.model.beta;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = (self.n_min + i as i64) as f64;
            let xs = x - beta * k;
            let amp = sigma * PI.sqrt() * (-xs * xs / (4.0 * sigma * sigma)).exp()
                * (-PI * PI * sigma * sigma * t * t).exp();
            let phase = Complex64::new(0.0, -PI * xs * t - 2.0 * PI * beta * k * t).exp();
            acc += c * amp * phase;
        }
        acc
    }

    /// Spectrogram `|Gf(x, t)|^2` via the factorized form.
    pub fn spectrogram(&self, x: f64, t: f64) -> f64 {
        SpectrogramCoeffs::new(self, x).eval(t)
    }

    /// Tensor product `f_omega(t) = f(t - omega) conj(f(t))`.
    pub fn tensor_eval(&self, omega: f64, t: f64) -> Complex64 {
        self.eval(t - omega) * self.eval(t).conj()
    }

    /// Expansion coefficients of `f_omega` over `(T_{(beta/2) l} phi_omega)_l`.
    pub fn tensor_coeffs(&self, omega: f64) -> TensorCoeffs {
        let len = self.coeffs.len() as i64;
        let l_min = 2 * self.n_min;
        let l_max = 2 * self.n_max();
        let mut d = vec![Complex64::new(0.0, 0.0); (l_max - l_min + 1) as usize];
        for (i, cn) in self.coeffs.iter().enumerate() {
            for (j, ck) in self.coeffs.iter().enumerate() {
                let n = self.n_min + i as i64;
                let k = self.n_min + j as i64;
                let a = tensor_kernel(&self.model, n, k, omega);
                d[(n + k - l_min) as usize] += a * cn * ck.conj();
            }
        }
        let _ = len;
        TensorCoeffs { model: self.model, omega, l_min, d }
    }

    /// Grid supremum of `|f|` on `[lo, hi]` with the given step.
    pub fn sup_norm(&self, lo: f64, hi: f64, step: f64) -> f64 {
        let mut sup = 0.0f64;
        let mut t = lo;
        while t <= hi + step / 2.0 {
            sup = sup.max(self.eval(t).norm());
            t += step;
        }
        sup
    }
}

/// `A(n, k) = e^{-(beta(n-k)+omega)^2/(4 sigma^2)} e^{omega^2/(4 sigma^2)}`.
fn tensor_kernel(model: &GaussianModel, n: i64, k: i64, omega: f64) -> f64 {
    let s4 = 4.0 * model.sigma * model.sigma;
    let u = model.beta * (n - k) as f64 + omega;
    ((-u * u + omega * omega) / s4).exp()
}

/// `phi_omega(t) = e^{-omega^2/(4 sigma^2)} phi^{sigma/sqrt(2)}(t - omega/2)`,
/// the tensor product of the generator with itself.
pub fn phi_omega(model: &GaussianModel, omega: f64, t: f64) -> f64 {
    let s2 = model.sigma * model.sigma;
    let u = t - omega / 2.0;
    (-omega * omega / (4.0 * s2)).exp() * (-u * u / s2).exp()
}

/// Coefficients `d_l` of `f_omega = sum_l d_l T_{(beta/2) l} phi_omega`.
#[derive(Debug, Clone)]
pub struct TensorCoeffs {
    pub model: GaussianModel,
    pub omega: f64,
    pub l_min: i64,
    pub d: Vec<Complex64>,
}

impl TensorCoeffs {
    /// Evaluate the expansion at `t`.
    pub fn eval(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, dl) in self.d.iter().enumerate() {
            let l = self.l_min + i as i64;
            acc += dl * phi_omega(&self.model, self.omega, t - self.model.beta * l as f64 / 2.0);
        }
        acc
    }

    /// Certified bound `|d_l| <= |c|_inf^2 sum_n A(n, l-n)` over the
    /// supported indices.
    pub fn coeff_bound(&self, l: i64, signal: &SIVSignal) -> f64 {
        let mut sum = 0.0;
        for i in 0..signal.coeffs.len() as i64 {
            let n = signal.n_min + i;
            let k = l - n;
            if k >= signal.n_min && k <= signal.n_max() {
                sum += tensor_kernel(&self.model, n, k, self.omega);
            }
        }
        signal.c_inf * signal.c_inf * sum
    }
}

/// Row coefficients `b_l(x)` of the spectrogram factorization at fixed `x`.
/// Constructing this once per sample row amortizes the coefficient sums.
#[derive(Debug, Clone)]
pub struct SpectrogramCoeffs {
    pub x: f64,
    pub l_min: i64,
    pub b: Vec<Complex64>,
    pub sigma_prime: f64,
    beta: f64,
    scale: f64,
}

impl SpectrogramCoeffs {
    pub fn new(f: &SIVSignal, x: f64) -> Self {
        let model = &f.model;
        let len = f.coeffs.len() as i64;
        let l_min = -(len - 1);
        let mut b = vec![Complex64::new(0.0, 0.0); (2 * len - 1) as usize];
        let s8 = 8.0 * model.sigma * model.sigma;
        for (jj, cj) in f.coeffs.iter().enumerate() {
            for (kk, ck) in f.coeffs.iter().enumerate() {
                let j = f.n_min + jj as i64;
                let k = f.n_min + kk as i64;
                let l = j - k;
                let damp = (-(model.beta * l as f64).powi(2) / s8).exp();
                let center = model.beta * (k + j) as f64 / 2.0;
                b[(l - l_min) as usize] += ck * cj.conj() * damp * model.window(x - center);
            }
        }
        Self {
            x,
            l_min,
            b,
            sigma_prime: model.sigma_prime(),
            beta: model.beta,
            scale: PI * model.sigma * model.sigma,
        }
    }

    /// `|Gf(x, t)|^2 = pi sigma^2 phi^{sigma'}(t) S_x(t)`, clamped at zero
    /// against negative round-off.
    pub fn eval(&self, t: f64) -> f64 {
        let damp = (-t * t / (2.0 * self.sigma_prime * self.sigma_prime)).exp();
        let v = self.scale * damp * self.s_x(t);
        if v < 0.0 {
            debug_assert!(v > -1e-12 * self.scale.max(1.0), "spectrogram round-off too negative: {v}");
            0.0
        } else {
            v
        }
    }

    /// The trigonometric polynomial `S_x(t) = sum_l b_l e^{pi i beta l t}`
    /// (real-valued since `b_{-l} = conj(b_l)`).
    pub fn s_x(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (i, bl) in self.b.iter().enumerate() {
            let l = self.l_min + i as i64;
            if l < 0 {
                continue;
            }
            let phase = Complex64::new(0.0, PI * self.beta * l as f64 * t).exp();
            let term = (bl * phase).re;
            acc += if l == 0 { term } else { 2.0 * term };
        }
        acc
    }

    /// Certified Gaussian bound `|c|_inf^2 (1 + (sigma/beta) sqrt(2 pi))
    /// e^{-(beta l / sigma)^2 / 8}` on `|b_l|`.
    pub fn coeff_bound(f: &SIVSignal, l: i64) -> f64 {
        let model = &f.model;
        f.c_inf
            * f.c_inf
            * (1.0 + (model.sigma / model.beta) * (2.0 * PI).sqrt())
            * (-(model.beta * l as f64 / model.sigma).powi(2) / 8.0).exp()
    }
}

/// A signal outside the shift-invariant space, given by an arbitrary
/// deterministic evaluator that is negligible outside
/// `[-support_radius, support_radius]`.
#[derive(Clone)]
pub struct GenericSignal {
    pub evaluator: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
    pub support_radius: f64,
}

impl std::fmt::Debug for GenericSignal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GenericSignal")
            .field("support_radius", &self.support_radius)
            .finish_non_exhaustive()
    }
}

impl GenericSignal {
    pub fn new<F>(evaluator: F, support_radius: f64) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self { evaluator: Arc::new(evaluator), support_radius }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        (self.evaluator)(t)
    }

    pub fn tensor_eval(&self, omega: f64, t: f64) -> Complex64 {
        self.eval(t - omega) * self.eval(t).conj()
    }

    /// Wrap a shift-invariant signal (its Gaussian tails are below 1e-15
    /// relative beyond ~9 sigma outside the coefficient extent).
    pub fn from_siv(f: &SIVSignal) -> Self {
        let radius = f.extent().0.abs().max(f.extent().1.abs()) + 9.0 * f.model.sigma;
        let f = f.clone();
        Self::new(move |t| f.eval(t), radius)
    }

    /// Complex-valued linear spline through `(knots[i], values[i])`, zero
    /// outside the knot range.
    pub fn spline(knots: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if knots.len() != values.len() || knots.len() < 2 {
            return Err(Error::Argument("spline needs matching knots/values, at least 2".into()));
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument("spline knots must be strictly increasing".into()));
        }
        let radius = knots[0].abs().max(knots[knots.len() - 1].abs());
        Ok(Self::new(
            move |t| {
                if t <= knots[0] || t >= knots[knots.len() - 1] {
                    return Complex64::new(0.0, 0.0);
                }
                let i = match knots.binary_search_by(|k| k.partial_cmp(&t).unwrap()) {
                    Ok(i) => return values[i],
                    Err(i) => i - 1,
                };
                let w = (t - knots[i]) / (knots[i + 1] - knots[i]);
                values[i] * (1.0 - w) + values[i + 1] * w
            },
            radius,
        ))
    }

    /// Band-limited signal `f(t) = sum_n c_n sinc(a t - n)` with
    /// `sinc(u) = sin(pi u)/(pi u)`; bandwidth `a`, coefficient indices
    /// starting at `n_min`. `support_radius` must be declared by the caller
    /// because sinc decay is only algebraic.
    pub fn sinc_series(
        bandwidth: f64,
        n_min: i64,
        coeffs: Vec<Complex64>,
        support_radius: f64,
    ) -> Result<Self> {
        if !(bandwidth > 0.0) {
            return Err(Error::Argument(format!("bandwidth must be positive, got {bandwidth}")));
        }
        if coeffs.is_empty() {
            return Err(Error::Argument("sinc series needs coefficients".into()));
        }
        Ok(Self::new(
            move |t| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, c) in coeffs.iter().enumerate() {
                    let u = bandwidth * t - (n_min + i as i64) as f64;
                    let s = if u.abs() < 1e-12 { 1.0 } else { (PI * u).sin() / (PI * u) };
                    acc += c * s;
                }
                acc
            },
            support_radius,
        ))
    }
}

/// `|integral of g(u) phi^sigma(u - x) e^{-2 pi i t u} du|^2` by adaptive
/// quadrature over the effective support (declared radius intersected with
/// the 12-sigma window around `x`).
pub fn generic_spectrogram(
    g: &GenericSignal,
    model: &GaussianModel,
    x: f64,
    t: f64,
    quad_tol: f64,
) -> Result<f64> {
    let lo = (-g.support_radius).max(x - 12.0 * model.sigma);
    let hi = g.support_radius.min(x + 12.0 * model.sigma);
    if lo >= hi {
        return Ok(0.0);
    }
    let ev = Arc::clone(&g.evaluator);
    let sigma = model.sigma;
    let integral = adaptive_simpson_complex(
        move |u| {
            let w = (-(u - x) * (u - x) / (2.0 * sigma * sigma)).exp();
            ev(u) * w * Complex64::new(0.0, -2.0 * PI * t * u).exp()
        },
        lo,
        hi,
        quad_tol,
    )?;
    Ok(integral.norm_sqr())
}

// ---------------------------------------------------------------------------
// Fixture files
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum SplineTag {
    #[serde(rename = "spline")]
    Spline,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum SincTag {
    #[serde(rename = "sinc_series")]
    SincSeries,
}

/// On-disk signal fixture. Shift-invariant signals are stored flat
/// (`{"sigma", "beta", "n_min", "coeffs": [[re, im], ...]}`); spline and
/// band-limited fixtures carry a `"kind"` discriminator.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SignalFixture {
    Spline {
        kind: SplineTag,
        knots: Vec<f64>,
        values: Vec<[f64; 2]>,
    },
    SincSeries {
        kind: SincTag,
        bandwidth: f64,
        n_min: i64,
        coeffs: Vec<[f64; 2]>,
        support_radius: f64,
    },
    Siv {
        sigma: f64,
        beta: f64,
        n_min: i64,
        coeffs: Vec<[f64; 2]>,
    },
}

fn to_complex(pairs: &[[f64; 2]]) -> Vec<Complex64> {
    pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect()
}

fn from_complex(values: &[Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|c| [c.re, c.im]).collect()
}

impl SignalFixture {
    pub fn from_siv(f: &SIVSignal) -> Self {
        Self::Siv {
            sigma: f.model.sigma,
            beta: f.model.beta,
            n_min: f.n_min,
            coeffs: from_complex(&f.coeffs),
        }
    }

    /// The shift-invariant signal, if this fixture is one.
    pub fn as_siv(&self) -> Result<SIVSignal> {
        match self {
            Self::Siv { sigma, beta, n_min, coeffs } => {
                SIVSignal::new(GaussianModel::new(*sigma, *beta)?, *n_min, to_complex(coeffs))
            }
            _ => Err(Error::Config("fixture is not a shift-invariant signal".into())),
        }
    }

    /// Any fixture as a generic evaluable signal.
    pub fn as_generic(&self) -> Result<GenericSignal> {
        match self {
            Self::Siv { .. } => Ok(GenericSignal::from_siv(&self.as_siv()?)),
            Self::Spline { knots, values, .. } => {
                GenericSignal::spline(knots.clone(), to_complex(values))
            }
            Self::SincSeries { bandwidth, n_min, coeffs, support_radius, .. } => {
                GenericSignal::sinc_series(*bandwidth, *n_min, to_complex(coeffs), *support_radius)
            }
        }
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        crate::cli::write_atomic(path, &(serde_json::to_string_pretty(self)? + "\n"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn model_fig2() -> GaussianModel {
        GaussianModel::new(1.0 / (2.0 * PI).sqrt(), 1.0).unwrap()
    }

    fn random_signal(rng: &mut ChaCha8Rng, model: GaussianModel, len: usize) -> SIVSignal {
        let n_min = -((len as i64 - 1) / 2);
        let coeffs = (0..len)
            .map(|_| {
                let mag: f64 = rng.gen_range(0.3..1.5);
                let phase: f64 = rng.gen_range(0.0..2.0 * PI);
                Complex64::from_polar(mag, phase)
            })
            .collect();
        SIVSignal::new(model, n_min, coeffs).unwrap()
    }

    #[test]
    fn eval_single_coefficient_and_linearity() {
        let model = model_fig2();
        let f = SIVSignal::new(model, 0, vec![Complex64::new(1.0, 0.0)]).unwrap();
        assert!((f.eval(0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let alpha = Complex64::new(0.0, 2.5);
        let g = SIVSignal::new(model, 0, vec![alpha]).unwrap();
        for t in [0.0, 0.4, -1.7] {
            assert!((g.eval(t) - alpha * f.eval(t)).norm() < 1e-14);
        }
    }

    #[test]
    fn eval_symmetric_bump_fixture() {
        // c_1 = c_{-1} = 1, beta = 1, sigma = 1/sqrt(2 pi): f(0) = 2 e^{-pi}
        let model = model_fig2();
        let f = SIVSignal::new(model, -1, vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])
        .unwrap();
        let expected = 2.0 * (-PI).exp();
        assert!((f.eval(0.0).re - expected).abs() < 1e-14);
    }

    #[test]
    fn gabor_of_generator_at_origin() {
        let model = model_fig2();
        let f = SIVSignal::new(model, 0, vec![Complex64::new(1.0, 0.0)]).unwrap();
        let v = f.gabor_transform(0.0, 0.0);
        assert!((v.norm() - 1.0 / std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn gabor_global_phase_invariance() {
        let model = model_fig2();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_signal(&mut rng, model, 5);
        let tau = Complex64::from_polar(1.0, 1.234);
        let g = SIVSignal::new(model, f.n_min, f.coeffs.iter().map(|c| c * tau).collect()).unwrap();
        for _ in 0..20 {
            let x: f64 = rng.gen_range(-3.0..3.0);
            let t: f64 = rng.gen_range(-3.0..3.0);
            assert!((f.gabor_transform(x, t).norm() - g.gabor_transform(x, t).norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn gabor_matches_quadrature_oracle() {
        let model = model_fig2();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = random_signal(&mut rng, model, 5);
        let (lo_ext, hi_ext) = f.extent();
        for _ in 0..20 {
            let x: f64 = rng.gen_range(-2.0..2.0);
            let t: f64 = rng.gen_range(-2.0..2.0);
            let fc = f.clone();
            let oracle = adaptive_simpson_complex(
                |u| {
                    fc.eval(u)
                        * model.window(u - x)
                        * Complex64::new(0.0, -2.0 * PI * t * u).exp()
                },
                lo_ext.min(x) - 12.0 * model.sigma,
                hi_ext.max(x) + 12.0 * model.sigma,
                1e-11,
            )
            .unwrap();
            let v = f.gabor_transform(x, t);
            assert!((v - oracle).norm() < 1e-9, "mismatch at ({x}, {t}): {}", (v - oracle).norm());
        }
    }

    #[test]
    fn spectrogram_factorization_matches_closed_form() {
        let model = model_fig2();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let f = random_signal(&mut rng, model, 7);
        for _ in 0..100 {
            let x: f64 = rng.gen_range(-4.0..4.0);
            let t: f64 = rng.gen_range(-4.0..4.0);
            let fac = f.spectrogram(x, t);
            let direct = f.gabor_transform(x, t).norm_sqr();
            let tol = 1e-10 * direct.max(1e-30);
            assert!((fac - direct).abs() <= tol.max(1e-25), "at ({x},{t}): {fac} vs {direct}");
            assert!(fac >= 0.0);
        }
    }

    #[test]
    fn spectrogram_coeff_bound_holds() {
        let model = model_fig2();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut f = random_signal(&mut rng, model, 6);
        // normalize to |c|_inf = 1 as in the stated bound check
        let scale = 1.0 / f.c_inf;
        f = SIVSignal::new(model, f.n_min, f.coeffs.iter().map(|c| c * scale).collect()).unwrap();
        for x in [-1.3, 0.0, 2.1] {
            let sc = SpectrogramCoeffs::new(&f, x);
            for (i, bl) in sc.b.iter().enumerate() {
                let l = sc.l_min + i as i64;
                assert!(
                    bl.norm() <= SpectrogramCoeffs::coeff_bound(&f, l) * (1.0 + 1e-12),
                    "b_{l}({x}) bound violated"
                );
            }
        }
    }

    #[test]
    fn tensor_coeffs_delta_at_origin() {
        let model = model_fig2();
        let f = SIVSignal::new(model, 0, vec![Complex64::new(1.0, 0.0)]).unwrap();
        let tc = f.tensor_coeffs(0.0);
        assert_eq!(tc.l_min, 0);
        assert_eq!(tc.d.len(), 1);
        assert!((tc.d[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn tensor_expansion_matches_direct_product() {
        let model = model_fig2();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let f = random_signal(&mut rng, model, 6);
        for _ in 0..25 {
            let omega: f64 = rng.gen_range(-1.5..1.5);
            let tc = f.tensor_coeffs(omega);
            let t: f64 = rng.gen_range(-4.0..4.0);
            let lhs = tc.eval(t);
            let rhs = f.tensor_eval(omega, t);
            assert!((lhs - rhs).norm() < 1e-10, "tensor mismatch {}", (lhs - rhs).norm());
            // coefficient bound
            for (i, dl) in tc.d.iter().enumerate() {
                let l = tc.l_min + i as i64;
                assert!(dl.norm() <= tc.coeff_bound(l, &f) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn tensor_eval_identities() {
        let model = model_fig2();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let f = random_signal(&mut rng, model, 5);
        for _ in 0..20 {
            let t: f64 = rng.gen_range(-3.0..3.0);
            let omega: f64 = rng.gen_range(-2.0..2.0);
            // f_0 = |f|^2
            let f0 = f.tensor_eval(0.0, t);
            assert!((f0 - Complex64::new(f.eval(t).norm_sqr(), 0.0)).norm() < 1e-13);
            // f_{-omega}(t) = conj(f_omega(t + omega))
            let a = f.tensor_eval(-omega, t);
            let b = f.tensor_eval(omega, t + omega).conj();
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn pointwise_recovery_from_tensor_values() {
        // f(p + omega) = tau f_0(p)^{-1/2} conj(f_omega(p + omega)), tau = f(p)/|f(p)|
        let model = model_fig2();
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let f = random_signal(&mut rng, model, 5);
        for _ in 0..20 {
            let p: f64 = rng.gen_range(-2.0..2.0);
            let omega: f64 = rng.gen_range(-1.0..1.0);
            let fp = f.eval(p);
            if fp.norm() < 1e-3 {
                continue;
            }
            let tau = fp / fp.norm();
            let recovered = tau * f.tensor_eval(omega, p + omega).conj()
                / f.tensor_eval(0.0, p).re.sqrt();
            assert!((recovered - f.eval(p + omega)).norm() < 1e-12);
        }
    }

    #[test]
    fn generic_spectrogram_matches_siv() {
        let model = model_fig2();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let f = random_signal(&mut rng, model, 5);
        let g = GenericSignal::from_siv(&f);
        for _ in 0..10 {
            let x: f64 = rng.gen_range(-2.0..2.0);
            let t: f64 = rng.gen_range(-2.0..2.0);
            let quad_tol = 1e-9;
            let a = generic_spectrogram(&g, &model, x, t, quad_tol).unwrap();
            let b = f.spectrogram(x, t);
            assert!((a - b).abs() <= 10.0 * quad_tol, "at ({x},{t}): {a} vs {b}");
        }
    }

    #[test]
    fn generic_spectrogram_zero_signal() {
        let model = model_fig2();
        let g = GenericSignal::new(|_| Complex64::new(0.0, 0.0), 5.0);
        let v = generic_spectrogram(&g, &model, 0.3, 0.7, 1e-9).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn spline_evaluates_and_vanishes_outside() {
        let g = GenericSignal::spline(
            vec![-1.0, 0.0, 1.0],
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(2.0, 1.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        assert!((g.eval(0.0) - Complex64::new(2.0, 1.0)).norm() < 1e-15);
        assert!((g.eval(0.5) - Complex64::new(1.0, 0.5)).norm() < 1e-15);
        assert_eq!(g.eval(3.0), Complex64::new(0.0, 0.0));
        assert_eq!(g.support_radius, 1.0);
    }

    #[test]
    fn sinc_series_interpolates_samples() {
        let g = GenericSignal::sinc_series(
            2.0,
            0,
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)],
            50.0,
        )
        .unwrap();
        // at t = n/a the series hits c_n exactly
        assert!((g.eval(0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((g.eval(0.5) - Complex64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn fixture_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let model = model_fig2();
        let f = SIVSignal::new(model, -2, vec![
            Complex64::new(1.0, 0.5),
            Complex64::new(-0.3, 0.0),
            Complex64::new(0.0, 2.0),
        ])
        .unwrap();
        let path = dir.path().join("sig.json");
        SignalFixture::from_siv(&f).save(&path).unwrap();
        let back = SignalFixture::load(&path).unwrap().as_siv().unwrap();
        assert_eq!(back.n_min, f.n_min);
        assert_eq!(back.coeffs, f.coeffs);

        // spline fixture via JSON text
        let spline_json = r#"{"kind":"spline","knots":[-1.0,1.0],"values":[[0.0,0.0],[1.0,1.0]]}"#;
        let fx: SignalFixture = serde_json::from_str(spline_json).unwrap();
        assert!(matches!(fx, SignalFixture::Spline { .. }));
        assert!(fx.as_generic().is_ok());
        assert!(fx.as_siv().is_err());
    }
}
