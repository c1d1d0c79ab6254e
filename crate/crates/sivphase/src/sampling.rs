//! Sampling grids, noise, sample matrices, mixed norms, and grid planning.
//!
//! The sample matrix holds `S(n, k) = |Gf((beta/2) n, h k)|^2 + eta(n, k)`
//! on the grid `X = (beta/2){-N..N} x h{-H..H}`. Grid parameters for a
//! target accuracy `eps` come from the closed-form plan
//!
//! ```text
//! 1/h >= sigma log(4 D |c|^2 (J-1)/eps + 1),
//! H   >= (1/h) sqrt(log(4 D |c|^2 (J-1)/eps) / b),
//! N   >= ceil((2/beta)(s + r/2)) + log(4 D |c|^2 (J-1)/eps) / a,
//! ```
//!
//! with certified constants `a = beta/8`, `b = 2 pi^2 sigma^2`,
//! `D = 40000 (2 + 16/beta)(1 + (sigma/beta) 2 sqrt(2 pi))^2` in the
//! explicit regime `beta/4 <= sigma <= beta/2 <= 1` (requiring `r <= 2 sigma`).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::GaussianModel;
use crate::quad::adaptive_simpson;
use crate::signal::{generic_spectrogram, GenericSignal, SIVSignal, SpectrogramCoeffs};

/// Sampling grid `X = (beta/2){-N..N} x h{-H..H}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub beta: f64,
    /// Frequency step `h`.
    pub h: f64,
    /// Half-extent `N` of the time lattice.
    pub time_half: usize,
    /// Half-extent `H` of the frequency lattice.
    pub freq_half: usize,
}

impl Grid {
    pub fn new(beta: f64, h: f64, time_half: usize, freq_half: usize) -> Result<Self> {
        if !(beta > 0.0) || !(h > 0.0) {
            return Err(Error::Argument(format!("grid needs beta, h > 0 (got {beta}, {h})")));
        }
        Ok(Self { beta, h, time_half, freq_half })
    }

    pub fn rows(&self) -> usize {
        2 * self.time_half + 1
    }

    pub fn cols(&self) -> usize {
        2 * self.freq_half + 1
    }

    /// Time node `(beta/2) n` for row index `i` (so `n = i - N`).
    pub fn time_node(&self, i: usize) -> f64 {
        (i as i64 - self.time_half as i64) as f64 * self.beta / 2.0
    }

    /// Frequency node `h k` for column index `j` (so `k = j - H`).
    pub fn freq_node(&self, j: usize) -> f64 {
        (j as i64 - self.freq_half as i64) as f64 * self.h
    }
}

/// Noise model for the sample matrix. Generation is deterministic given the
/// seed and proceeds in row-major node order, independent of any execution
/// parallelism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSpec {
    None,
    Gaussian { sd: f64, seed: u64 },
    /// Seeded uniform matrix rescaled so the maximum absolute row sum equals
    /// `delta` exactly.
    AdversarialRowSum { delta: f64, seed: u64 },
}

fn generate_noise(spec: &NoiseSpec, rows: usize, cols: usize) -> Result<Vec<f64>> {
    match spec {
        NoiseSpec::None => Ok(vec![0.0; rows * cols]),
        NoiseSpec::Gaussian { sd, seed } => {
            if *sd < 0.0 {
                return Err(Error::Argument(format!("gaussian sd must be >= 0, got {sd}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let normal = Normal::new(0.0, *sd)
                .map_err(|e| Error::Argument(format!("bad gaussian noise spec: {e}")))?;
            Ok((0..rows * cols).map(|_| normal.sample(&mut rng)).collect())
        }
        NoiseSpec::AdversarialRowSum { delta, seed } => {
            if *delta < 0.0 {
                return Err(Error::Argument(format!("adversarial delta must be >= 0, got {delta}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut eta: Vec<f64> = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let max_row = noise_inf_norm(&eta, cols);
            if max_row > 0.0 {
                let scale = delta / max_row;
                for v in &mut eta {
                    *v *= scale;
                }
            }
            Ok(eta)
        }
    }
}

/// Maximum absolute row sum of a row-major matrix with `cols` columns.
pub fn noise_inf_norm(values: &[f64], cols: usize) -> f64 {
    assert!(cols > 0 && values.len() % cols == 0, "matrix shape mismatch");
    values
        .chunks(cols)
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Noisy spectrogram samples on a grid, with cached row sums for the
/// modulus-squared expansion.
#[derive(Debug, Clone)]
pub struct SampleMatrix {
    pub grid: Grid,
    pub sigma: f64,
    /// Row-major `(2N+1) x (2H+1)` values; row `i` is time node `(beta/2)(i-N)`.
    pub values: Vec<f64>,
    pub noise_inf_norm_actual: f64,
    row_sums: Vec<f64>,
}

impl SampleMatrix {
    fn assemble(grid: Grid, sigma: f64, values: Vec<f64>, noise_inf_norm_actual: f64) -> Self {
        let cols = grid.cols();
        let row_sums = values.chunks(cols).map(|row| row.iter().sum()).collect();
        Self { grid, sigma, values, noise_inf_norm_actual, row_sums }
    }

    /// Entry at lattice indices `n in [-N, N]`, `k in [-H, H]`.
    #[inline]
    pub fn value(&self, n: i64, k: i64) -> f64 {
        let i = (n + self.grid.time_half as i64) as usize;
        let j = (k + self.grid.freq_half as i64) as usize;
        self.values[i * self.grid.cols() + j]
    }

    /// `sum_k S(n, k)` (the inner sum of the modulus-squared expansion).
    #[inline]
    pub fn row_sum(&self, n: i64) -> f64 {
        self.row_sums[(n + self.grid.time_half as i64) as usize]
    }

    /// Row slice at lattice index `n`.
    #[inline]
    pub fn row(&self, n: i64) -> &[f64] {
        let i = (n + self.grid.time_half as i64) as usize;
        let cols = self.grid.cols();
        &self.values[i * cols..(i + 1) * cols]
    }

    pub fn model(&self) -> GaussianModel {
        GaussianModel { sigma: self.sigma, beta: self.grid.beta }
    }

    /// Sample a shift-invariant signal: exact factorized spectrogram plus
    /// generated noise.
    pub fn sample_siv(f: &SIVSignal, grid: Grid, noise: &NoiseSpec) -> Result<Self> {
        if (f.model.beta - grid.beta).abs() > 1e-12 {
            return Err(Error::Argument(format!(
                "grid beta {} does not match signal beta {}",
                grid.beta, f.model.beta
            )));
        }
        let eta = generate_noise(noise, grid.rows(), grid.cols())?;
        let eta_norm = noise_inf_norm(&eta, grid.cols());
        let mut values = vec![0.0; grid.rows() * grid.cols()];
        for i in 0..grid.rows() {
            let x = grid.time_node(i);
            let sc = SpectrogramCoeffs::new(f, x);
            for j in 0..grid.cols() {
                values[i * grid.cols() + j] = sc.eval(grid.freq_node(j)) + eta[i * grid.cols() + j];
            }
        }
        Ok(Self::assemble(grid, f.model.sigma, values, eta_norm))
    }

    /// Sample a generic signal through the quadrature spectrogram.
    pub fn sample_generic(
        g: &GenericSignal,
        model: &GaussianModel,
        grid: Grid,
        noise: &NoiseSpec,
        quad_tol: f64,
    ) -> Result<Self> {
        if (model.beta - grid.beta).abs() > 1e-12 {
            return Err(Error::Argument("grid beta does not match model beta".into()));
        }
        let eta = generate_noise(noise, grid.rows(), grid.cols())?;
        let eta_norm = noise_inf_norm(&eta, grid.cols());
        let mut values = vec![0.0; grid.rows() * grid.cols()];
        for i in 0..grid.rows() {
            let x = grid.time_node(i);
            for j in 0..grid.cols() {
                values[i * grid.cols() + j] =
                    generic_spectrogram(g, model, x, grid.freq_node(j), quad_tol)?
                        + eta[i * grid.cols() + j];
            }
        }
        Ok(Self::assemble(grid, model.sigma, values, eta_norm))
    }

    /// Write as CSV: a header line naming `beta,h,N,H,sigma`, a line with
    /// those five values, then `2N+1` rows of `2H+1` comma-separated reals.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        out.push_str("beta,h,N,H,sigma\n");
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(self.grid.beta),
            fmt_f64(self.grid.h),
            self.grid.time_half,
            self.grid.freq_half,
            fmt_f64(self.sigma)
        ));
        for row in self.values.chunks(self.grid.cols()) {
            let line: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        crate::cli::write_atomic(path, &out)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty sample CSV".into()))?;
        if header.trim() != "beta,h,N,H,sigma" {
            return Err(Error::Parse(format!("unexpected sample CSV header: {header}")));
        }
        let params = lines.next().ok_or_else(|| Error::Parse("missing parameter line".into()))?;
        let p: Vec<&str> = params.split(',').collect();
        if p.len() != 5 {
            return Err(Error::Parse("parameter line needs 5 fields".into()));
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim().parse().map_err(|e| Error::Parse(format!("bad number {s:?}: {e}")))
        };
        let beta = parse(p[0])?;
        let h = parse(p[1])?;
        let time_half = parse(p[2])? as usize;
        let freq_half = parse(p[3])? as usize;
        let sigma = parse(p[4])?;
        let grid = Grid::new(beta, h, time_half, freq_half)?;
        let mut values = Vec::with_capacity(grid.rows() * grid.cols());
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            for field in line.split(',') {
                values.push(parse(field)?);
            }
        }
        if values.len() != grid.rows() * grid.cols() {
            return Err(Error::Parse(format!(
                "expected {}x{} = {} values, found {}",
                grid.rows(),
                grid.cols(),
                grid.rows() * grid.cols(),
                values.len()
            )));
        }
        // noise norm is unknown from the CSV alone; the sidecar carries it
        Ok(Self::assemble(grid, sigma, values, 0.0))
    }
}

fn fmt_f64(v: f64) -> String {
    // shortest representation that round-trips
    let mut s = format!("{v}");
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}

/// Provenance sidecar written next to a sample CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleSidecar {
    pub noise: NoiseSpec,
    pub noise_inf_norm_actual: f64,
    pub signal_ref: Option<String>,
}

impl SampleSidecar {
    pub fn path_for(csv: &Path) -> std::path::PathBuf {
        let mut name = csv.file_name().unwrap_or_default().to_os_string();
        name.push(".meta.json");
        csv.with_file_name(name)
    }

    pub fn save(&self, csv: &Path) -> Result<()> {
        crate::cli::write_atomic(&Self::path_for(csv), &(serde_json::to_string_pretty(self)? + "\n"))
    }

    pub fn load(csv: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(Self::path_for(csv))?;
        Ok(serde_json::from_str(&text)?)
    }
}

// ---------------------------------------------------------------------------
// Mixed norm
// ---------------------------------------------------------------------------

/// Exponent of the outer lattice norm in the mixed norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PNorm {
    Finite(f64),
    Inf,
}

/// Mixed norm `|| |Gf|^2 - |Gg|^2 ||_{alpha, p}`: the `l^p` norm over the
/// lattice `alpha Z` of the `L^1(R)` norms in the frequency variable.
///
/// Inner integrals run over `[-T, T]` with `T` from the Gaussian
/// factorization envelope (`|Gf(x, .)|^2` decays like `e^{-t^2/(2 sigma'^2)}`);
/// the outer sum keeps lattice nodes within 9 sigma of the coefficient
/// extents, beyond which both spectrograms are negligible.
pub fn mixed_norm(f: &SIVSignal, g: &SIVSignal, alpha: f64, p: PNorm, quad_tol: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Argument(format!("alpha must be positive, got {alpha}")));
    }
    if let PNorm::Finite(q) = p {
        if !(1.0..f64::INFINITY).contains(&q) {
            return Err(Error::Argument(format!("p must lie in [1, inf], got {q}")));
        }
    }
    if (f.model.sigma - g.model.sigma).abs() > 1e-12 || (f.model.beta - g.model.beta).abs() > 1e-12
    {
        return Err(Error::Argument("mixed norm needs signals over the same model".into()));
    }
    let model = f.model;
    let radius_t = 12.0 * model.sigma_prime().max(1e-6);
    let pad = 9.0 * model.sigma;
    let lo = f.extent().0.min(g.extent().0) - pad;
    let hi = f.extent().1.max(g.extent().1) + pad;
    let n_lo = (lo / alpha).floor() as i64;
    let n_hi = (hi / alpha).ceil() as i64;

    let mut inner = Vec::new();
    for n in n_lo..=n_hi {
        let x = alpha * n as f64;
        let sf = SpectrogramCoeffs::new(f, x);
        let sg = SpectrogramCoeffs::new(g, x);
        let v = adaptive_simpson(
            |t| (sf.eval(t) - sg.eval(t)).abs(),
            -radius_t,
            radius_t,
            quad_tol,
        )?;
        inner.push(v);
    }
    Ok(match p {
        PNorm::Inf => inner.iter().copied().fold(0.0, f64::max),
        PNorm::Finite(q) => inner.iter().map(|v| v.powf(q)).sum::<f64>().powf(1.0 / q),
    })
}

// ---------------------------------------------------------------------------
// Grid planning
// ---------------------------------------------------------------------------

/// Grid parameters and noise budget derived from the closed-form plan.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridPlan {
    pub h: f64,
    pub freq_half: usize,
    pub time_half: usize,
    /// Lattice margin `m = N - ceil((2/beta)(s + r/2))`.
    pub margin: usize,
    /// Noise budget `eps / (4 h (J-1) D)` for a known partition.
    pub noise_budget: f64,
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub epsilon: f64,
    pub j: usize,
    pub gamma: f64,
    pub s: f64,
    pub r: f64,
    pub c_inf: f64,
}

impl GridPlan {
    pub fn grid(&self, beta: f64) -> Result<Grid> {
        Grid::new(beta, self.h, self.time_half, self.freq_half)
    }

    /// Noise budget `eps r / (16 h D s)` for the detection pipeline, where
    /// the partition is found from the data rather than given.
    pub fn detection_noise_budget(&self) -> f64 {
        self.epsilon * self.r / (16.0 * self.h * self.d * self.s)
    }
}

/// Certified plan constants in the explicit regime (requires `r <= 2 sigma`):
/// `a = beta/8`, `b = 2 pi^2 sigma^2`,
/// `D = 40000 (2 + 16/beta)(1 + (sigma/beta) 2 sqrt(2 pi))^2`.
pub fn explicit_plan_constants(model: &GaussianModel, r: f64) -> Result<(f64, f64, f64)> {
    if !model.explicit_regime() {
        return Err(Error::Config(format!(
            "(sigma, beta) = ({}, {}) is outside the explicit regime; supply (a, b, D) overrides",
            model.sigma, model.beta
        )));
    }
    if r > 2.0 * model.sigma {
        return Err(Error::Config(format!(
            "explicit plan constants need r <= 2 sigma (r = {r}, sigma = {})",
            model.sigma
        )));
    }
    let a = model.beta / 8.0;
    let b = 2.0 * PI * PI * model.sigma * model.sigma;
    let ratio = 1.0 + (model.sigma / model.beta) * 2.0 * (2.0 * PI).sqrt();
    let d = 40_000.0 * (2.0 + 16.0 / model.beta) * ratio * ratio;
    Ok((a, b, d))
}

fn plan_dims(
    model: &GaussianModel,
    consts: (f64, f64, f64),
    r: f64,
    s: f64,
    eps: f64,
    j_minus_1: f64,
    c_inf: f64,
) -> (f64, usize, usize, usize) {
    let (a, b, d) = consts;
    let big = 4.0 * d * c_inf * c_inf * j_minus_1 / eps;
    let l = big.ln().max(0.0);
    let inv_h = model.sigma * (big + 1.0).ln();
    let h = 1.0 / inv_h;
    let freq_half = (inv_h * (l / b).sqrt()).ceil() as usize;
    let base_n = ((2.0 / model.beta) * (s + r / 2.0)).ceil() as usize;
    let margin = ((l / a).ceil() as usize).max(1);
    (h, freq_half, base_n + margin, margin)
}

/// Choose maximal `h` and minimal `H`, `N` meeting the plan inequalities for
/// target accuracy `eps` with `J` partition points over `[-s, s]` and gap
/// bound `r`. Outside the explicit regime, `(a, b, D)` overrides must be
/// supplied.
#[allow(clippy::too_many_arguments)]
pub fn select_grid_params(
    model: &GaussianModel,
    r: f64,
    s: f64,
    gamma: f64,
    eps: f64,
    j: usize,
    c_inf: f64,
    overrides: Option<(f64, f64, f64)>,
) -> Result<GridPlan> {
    if !(r > 0.0 && s > 0.0 && gamma > 0.0 && eps > 0.0 && c_inf > 0.0) {
        return Err(Error::Argument("plan inputs r, s, gamma, eps, c_inf must be positive".into()));
    }
    if j < 2 {
        return Err(Error::Argument(format!("plan needs J >= 2 partition points, got {j}")));
    }
    let consts = match overrides {
        Some((a, b, d)) => {
            if !(a > 0.0 && b > 0.0 && d > 0.0) {
                return Err(Error::Config("plan constant overrides must be positive".into()));
            }
            (a, b, d)
        }
        None => explicit_plan_constants(model, r)?,
    };
    let j_minus_1 = (j - 1) as f64;
    let (h, freq_half, time_half, margin) =
        plan_dims(model, consts, r, s, eps, j_minus_1, c_inf);
    let (a, b, d) = consts;
    let plan = GridPlan {
        h,
        freq_half,
        time_half,
        margin,
        noise_budget: eps / (4.0 * h * j_minus_1 * d),
        a,
        b,
        d,
        epsilon: eps,
        j,
        gamma,
        s,
        r,
        c_inf,
    };
    verify_plan(model, &plan)?;
    Ok(plan)
}

/// Re-check the three plan inequalities after rounding.
fn verify_plan(model: &GaussianModel, plan: &GridPlan) -> Result<()> {
    let big = 4.0 * plan.d * plan.c_inf * plan.c_inf * (plan.j as f64 - 1.0) / plan.epsilon;
    let l = big.ln().max(0.0);
    let slack = 1.0 + 1e-9;
    let ok_h = 1.0 / plan.h * slack >= model.sigma * (big + 1.0).ln();
    let ok_freq = plan.freq_half as f64 * slack >= (1.0 / plan.h) * (l / plan.b).sqrt();
    let base = ((2.0 / model.beta) * (plan.s + plan.r / 2.0)).ceil();
    let ok_time = plan.time_half as f64 * slack >= base + l / plan.a;
    if ok_h && ok_freq && ok_time {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "plan inequalities failed after rounding (h: {ok_h}, H: {ok_freq}, N: {ok_time})"
        )))
    }
}

/// Total sample count `(2N+1)(2H+1)` of a plan in which the partition length
/// is replaced by the worst-case bound `J - 1 <= 4s/r`.
pub fn sample_count(
    model: &GaussianModel,
    r: f64,
    s: f64,
    eps: f64,
    c_inf: f64,
    overrides: Option<(f64, f64, f64)>,
) -> Result<u64> {
    if !(r > 0.0 && s > 0.0 && eps > 0.0 && c_inf > 0.0) {
        return Err(Error::Argument("sample_count inputs must be positive".into()));
    }
    let consts = match overrides {
        Some(c) => c,
        None => explicit_plan_constants(model, r)?,
    };
    let j_minus_1 = 4.0 * s / r;
    let (_, freq_half, time_half, _) = plan_dims(model, consts, r, s, eps, j_minus_1, c_inf);
    Ok((2 * time_half as u64 + 1) * (2 * freq_half as u64 + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive_simpson;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn model_fig2() -> GaussianModel {
        GaussianModel::new(1.0 / (2.0 * PI).sqrt(), 1.0).unwrap()
    }

    fn generator(model: GaussianModel) -> SIVSignal {
        SIVSignal::new(model, 0, vec![Complex64::new(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn noiseless_samples_equal_spectrogram() {
        let model = model_fig2();
        let f = generator(model);
        let grid = Grid::new(1.0, 0.25, 3, 4).unwrap();
        let s = SampleMatrix::sample_siv(&f, grid, &NoiseSpec::None).unwrap();
        assert_eq!(s.values.len(), 7 * 9);
        assert_eq!(s.noise_inf_norm_actual, 0.0);
        for n in -3i64..=3 {
            for k in -4i64..=4 {
                let clean = f.spectrogram(0.5 * n as f64, 0.25 * k as f64);
                assert_eq!(s.value(n, k), clean);
            }
        }
    }

    #[test]
    fn gaussian_noise_is_deterministic() {
        let model = model_fig2();
        let f = generator(model);
        let grid = Grid::new(1.0, 0.25, 5, 5).unwrap();
        let spec = NoiseSpec::Gaussian { sd: 0.001, seed: 99 };
        let a = SampleMatrix::sample_siv(&f, grid, &spec).unwrap();
        let b = SampleMatrix::sample_siv(&f, grid, &spec).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.noise_inf_norm_actual, b.noise_inf_norm_actual);
        assert!(a.noise_inf_norm_actual > 0.0);
    }

    #[test]
    fn dense_grid_dimensions() {
        // beta = 1, X = (1/2){-40..40} x (1/12){-60..60} gives 81 x 121
        let grid = Grid::new(1.0, 1.0 / 12.0, 40, 60).unwrap();
        assert_eq!(grid.rows(), 81);
        assert_eq!(grid.cols(), 121);
        assert_eq!(grid.time_node(0), -20.0);
        assert_eq!(grid.time_node(80), 20.0);
        assert!((grid.freq_node(120) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn noise_inf_norm_examples() {
        assert_eq!(noise_inf_norm(&[1.0, -2.0, 3.0, 0.0], 2), 3.0);
        assert_eq!(noise_inf_norm(&[1.0, -2.0, 3.0, -4.0], 4), 10.0);
        assert_eq!(noise_inf_norm(&[0.0; 6], 3), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m: Vec<f64> = (0..20).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let brute = (0..4)
            .map(|i| (0..5).map(|j| m[i * 5 + j].abs()).sum::<f64>())
            .fold(0.0, f64::max);
        assert_eq!(noise_inf_norm(&m, 5), brute);
    }

    #[test]
    fn adversarial_noise_hits_delta_exactly() {
        let eta = generate_noise(&NoiseSpec::AdversarialRowSum { delta: 0.01, seed: 7 }, 9, 11)
            .unwrap();
        let norm = noise_inf_norm(&eta, 11);
        assert!((norm - 0.01).abs() < 1e-15);
    }

    #[test]
    fn mixed_norm_basic_properties() {
        let model = model_fig2();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let coeffs: Vec<Complex64> = (0..4)
            .map(|_| Complex64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..6.28)))
            .collect();
        let f = SIVSignal::new(model, -1, coeffs.clone()).unwrap();
        let mut coeffs2 = coeffs;
        coeffs2[1] += Complex64::new(0.05, -0.02);
        let g = SIVSignal::new(model, -1, coeffs2).unwrap();

        let ff = mixed_norm(&f, &f, 0.5, PNorm::Inf, 1e-9).unwrap();
        assert!(ff.abs() < 1e-12);
        let fg = mixed_norm(&f, &g, 0.5, PNorm::Inf, 1e-9).unwrap();
        let gf = mixed_norm(&g, &f, 0.5, PNorm::Inf, 1e-9).unwrap();
        assert!((fg - gf).abs() < 1e-9);
        assert!(fg > 0.0);

        assert!(mixed_norm(&f, &g, 0.5, PNorm::Finite(0.5), 1e-9).is_err());
    }

    #[test]
    fn mixed_norm_scaled_generator_oracle() {
        // f = phi, g = 2 phi: || |Gf|^2 - |Gg|^2 ||_{1/2, inf} = 3 max_n int |Gphi(n/2, .)|^2
        let model = model_fig2();
        let f = generator(model);
        let g = SIVSignal::new(model, 0, vec![Complex64::new(2.0, 0.0)]).unwrap();
        let v = mixed_norm(&f, &g, 0.5, PNorm::Inf, 1e-10).unwrap();
        let mut oracle = 0.0f64;
        for n in -8i64..=8 {
            let x = 0.5 * n as f64;
            let integral = adaptive_simpson(
                |t| f.gabor_transform(x, t).norm_sqr(),
                -6.0,
                6.0,
                1e-11,
            )
            .unwrap();
            oracle = oracle.max(3.0 * integral);
        }
        assert!((v - oracle).abs() < 1e-7, "mixed norm {v} vs oracle {oracle}");
    }

    #[test]
    fn mixed_norm_triangle_inequality() {
        let model = model_fig2();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mk = |rng: &mut ChaCha8Rng| {
            let coeffs: Vec<Complex64> = (0..3)
                .map(|_| Complex64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..6.28)))
                .collect();
            SIVSignal::new(model, -1, coeffs).unwrap()
        };
        let f = mk(&mut rng);
        let g = mk(&mut rng);
        let k = mk(&mut rng);
        let fg = mixed_norm(&f, &g, 0.5, PNorm::Inf, 1e-9).unwrap();
        let fk = mixed_norm(&f, &k, 0.5, PNorm::Inf, 1e-9).unwrap();
        let kg = mixed_norm(&k, &g, 0.5, PNorm::Inf, 1e-9).unwrap();
        assert!(fg <= fk + kg + 1e-7);
    }

    #[test]
    fn plan_monotone_in_eps() {
        let model = GaussianModel::new(0.25, 1.0).unwrap();
        let p1 = select_grid_params(&model, 0.5, 4.0, 0.5, 1e-3, 5, 1.0, None).unwrap();
        let p2 = select_grid_params(&model, 0.5, 4.0, 0.5, 5e-4, 5, 1.0, None).unwrap();
        assert!(1.0 / p2.h >= 1.0 / p1.h);
        assert!(p2.freq_half >= p1.freq_half);
        assert!(p2.time_half >= p1.time_half);
    }

    #[test]
    fn plan_constants_in_explicit_regime() {
        let model = GaussianModel::new(0.25, 1.0).unwrap();
        let plan = select_grid_params(&model, 0.5, 4.0, 0.5, 1e-3, 5, 1.0, None).unwrap();
        assert!((plan.a - 0.125).abs() < 1e-15);
        assert!((plan.b - PI * PI / 8.0).abs() < 1e-12);
        assert!(plan.noise_budget > 0.0);
        assert!(plan.detection_noise_budget() > 0.0);
    }

    #[test]
    fn plan_requires_overrides_outside_explicit_regime() {
        let model = GaussianModel::new(1.0, 1.0).unwrap();
        assert!(matches!(
            select_grid_params(&model, 0.5, 4.0, 0.5, 1e-3, 5, 1.0, None),
            Err(Error::Config(_))
        ));
        assert!(
            select_grid_params(&model, 0.5, 4.0, 0.5, 1e-3, 5, 1.0, Some((0.1, 1.0, 100.0)))
                .is_ok()
        );
    }

    #[test]
    fn plan_dominates_dense_figure_grid() {
        // at eps = 1e-13 the plan for s = 40 is at least as fine as the
        // 161 x 151 grid with h = 1/15
        let model = model_fig2();
        let plan = select_grid_params(&model, 0.5, 40.0, 1.0, 1e-13, 9, 1.5, None).unwrap();
        assert!(plan.h <= 1.0 / 15.0, "h = {}", plan.h);
        assert!(2 * plan.time_half + 1 >= 161);
        assert!(2 * plan.freq_half + 1 >= 151, "cols = {}", 2 * plan.freq_half + 1);
    }

    #[test]
    fn sample_count_monotone_in_s() {
        let model = model_fig2();
        let mut prev = 0u64;
        for s in [4.0, 8.0, 16.0, 32.0, 64.0] {
            let n = sample_count(&model, 0.5, s, 1e-3, 1.0, None).unwrap();
            assert!(n > prev, "N({s}) = {n} not greater than {prev}");
            prev = n;
        }
    }

    #[test]
    fn sample_count_eps_scaling_bounded() {
        // fixed s: N grows like L^{3/2} (s + L) with L the plan logarithm
        let model = model_fig2();
        let (r, s, c_inf) = (0.5, 8.0, 1.0);
        let (_, _, d) = explicit_plan_constants(&model, r).unwrap();
        let mut ratios = Vec::new();
        for exp in 2..=8 {
            let eps = 10f64.powi(-exp);
            let n = sample_count(&model, r, s, eps, c_inf, None).unwrap() as f64;
            let l = (4.0 * d * c_inf * c_inf * (4.0 * s / r) / eps).ln();
            ratios.push(n / (l.powf(1.5) * (s + l)));
        }
        let max = ratios.iter().copied().fold(f64::MIN, f64::max);
        let min = ratios.iter().copied().fold(f64::MAX, f64::min);
        assert!(max / min < 1.5, "ratio spread {min}..{max}");
    }

    #[test]
    fn csv_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let model = model_fig2();
        let f = generator(model);
        let grid = Grid::new(1.0, 0.25, 4, 6).unwrap();
        let s = SampleMatrix::sample_siv(&f, grid, &NoiseSpec::Gaussian { sd: 0.01, seed: 3 })
            .unwrap();
        let path = dir.path().join("samples.csv");
        s.write_csv(&path).unwrap();
        let sidecar = SampleSidecar {
            noise: NoiseSpec::Gaussian { sd: 0.01, seed: 3 },
            noise_inf_norm_actual: s.noise_inf_norm_actual,
            signal_ref: None,
        };
        sidecar.save(&path).unwrap();

        let back = SampleMatrix::read_csv(&path).unwrap();
        assert_eq!(back.grid, s.grid);
        assert_eq!(back.values, s.values);
        let meta = SampleSidecar::load(&path).unwrap();
        assert_eq!(meta.noise_inf_norm_actual, s.noise_inf_norm_actual);

        // text layout: header, parameter line, then 2N+1 rows
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "beta,h,N,H,sigma");
        assert_eq!(lines.len(), 2 + grid.rows());
        assert_eq!(lines[2].split(',').count(), grid.cols());
    }
}
