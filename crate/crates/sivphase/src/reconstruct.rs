//! Non-iterative reconstruction from noisy spectrogram samples.
//!
//! The Fourier identity `int |Gf(x, t)|^2 e^{-2 pi i omega t} dt =
//! <f_omega, T_x phi_omega>` turns each sample row into approximate
//! biorthogonal-expansion coefficients of the tensor product
//! `f_omega = (T_omega f) conj(f)`. Around each partition point `p_j` where
//! `|f(p_j)| >= gamma` the local reconstruction
//!
//! ```text
//! L_j(omega) = (h / sqrt(c_j)) sum_n (sum_k S(n,k) e^{2 pi i omega h k})
//!              phi~_omega(p_j + omega - (beta/2) n),
//! c_j = h sum_n (sum_k S(n,k)) phi~_0(p_j - (beta/2) n)  (approx |f(p_j)|^2),
//! ```
//!
//! recovers `f` near `p_j` up to one unimodular factor; consecutive pieces are
//! synchronized through the phases `nu_j` of `L_j` at the gap `p_{j+1} - p_j`.
//! The module also evaluates the certified four-term bound on
//! `|f_omega(p_j + omega) - sqrt(c_j) conj(L_j(omega))|` (lattice truncation,
//! trapezoid aliasing, frequency cutoff, noise) and projects generic signals
//! onto the shift-invariant tensor space.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::GaussianModel;
use crate::sampling::SampleMatrix;
use crate::signal::SIVSignal;
use crate::special::{dual_tensor_eval, DecayConstants, DualGeneratorTable};

/// Partition points `p_1 < ... < p_J` with gap bound `r` and modulus floor
/// `gamma`: the reconstruction assumes `|f(p_j)| >= gamma` and
/// `p_{j+1} - p_j <= r`.
#[derive(Debug, Clone, Serialize)]
pub struct Partition {
    pub points: Vec<f64>,
    pub gamma: f64,
    pub r: f64,
}

impl Partition {
    pub fn new(points: Vec<f64>, gamma: f64, r: f64) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::PartitionTooShort { found: points.len() });
        }
        if !(gamma > 0.0 && r > 0.0) {
            return Err(Error::Argument(format!(
                "partition needs gamma, r > 0 (got {gamma}, {r})"
            )));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Argument("partition points must be strictly increasing".into()));
        }
        if points.windows(2).any(|w| w[1] - w[0] > r * (1.0 + 1e-12)) {
            return Err(Error::Argument(format!("partition gap exceeds r = {r}")));
        }
        Ok(Self { points, gamma, r })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_gap(&self) -> f64 {
        self.points.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Whether a modulus evaluator stays at or above `gamma` on every point.
    pub fn admissible_for<F: Fn(f64) -> f64>(&self, modulus: F) -> bool {
        self.points.iter().all(|&p| modulus(p) >= self.gamma)
    }
}

/// `F(t) = h sum_n (sum_k S(n,k)) phi~_0(t - (beta/2) n)`, the sample-side
/// approximation of `|f(t)|^2` (the omega = 0 projection evaluated at `t`).
pub fn modulus_sq_approx(samples: &SampleMatrix, table: &DualGeneratorTable, t: f64) -> f64 {
    let model = samples.model();
    let n_half = samples.grid.time_half as i64;
    let mut acc = 0.0;
    for n in -n_half..=n_half {
        let w = dual_tensor_eval(t - model.beta * n as f64 / 2.0, 0.0, &model, table);
        if w != 0.0 {
            acc += samples.row_sum(n) * w;
        }
    }
    samples.grid.h * acc
}

/// `h sum_n phi~_omega(t - (beta/2) n) sum_k S(n,k) e^{2 pi i omega h k}`,
/// the un-normalized local reconstruction at evaluation point `t = p + omega`.
fn local_raw(
    samples: &SampleMatrix,
    table: &DualGeneratorTable,
    p: f64,
    omega: f64,
) -> Complex64 {
    let model = samples.model();
    let grid = &samples.grid;
    let n_half = grid.time_half as i64;
    let k_half = grid.freq_half as i64;
    let t = p + omega;

    // Collapse the rows first: the dual window is compactly supported in
    // practice, so most rows contribute nothing.
    let cols = grid.cols();
    let mut col_acc = vec![0.0f64; cols];
    let mut any = false;
    for n in -n_half..=n_half {
        let w = dual_tensor_eval(t - model.beta * n as f64 / 2.0, omega, &model, table);
        if w == 0.0 {
            continue;
        }
        any = true;
        let row = samples.row(n);
        for (j, v) in row.iter().enumerate() {
            col_acc[j] += w * v;
        }
    }
    if !any {
        return Complex64::new(0.0, 0.0);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, cv) in col_acc.iter().enumerate() {
        let k = j as i64 - k_half;
        let phase = Complex64::from_polar(1.0, 2.0 * PI * omega * grid.h * k as f64);
        acc += cv * phase;
    }
    grid.h * acc
}

/// A synchronized piecewise reconstruction `R`.
///
/// On the segment `(p_j, p_{j+1}]` (and at `R(p_1) = L_1(0)`),
/// `R(t) = nu_1 ... nu_{j-1} L_j(t - p_j)` with `nu_j` the unimodular part of
/// `L_j(p_{j+1} - p_j)`. With `zero_outside` set (the detection pipeline),
/// `R` vanishes outside `[p_1, p_J]`; otherwise the first and last local
/// reconstructions extend beyond the partition.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub partition: Partition,
    /// `c_j`, the approximate `|f(p_j)|^2` at each partition point.
    pub c: Vec<f64>,
    /// Synchronization phases `nu_j`, `j = 1 .. J-1`.
    pub nu: Vec<Complex64>,
    /// `prefix[j-1] = nu_1 ... nu_{j-1}` (so `prefix[0] = 1`).
    pub prefix: Vec<Complex64>,
    pub zero_outside: bool,
    samples: SampleMatrix,
    table: DualGeneratorTable,
}

impl Reconstruction {
    /// Local reconstruction `L_j(omega)` for the 1-based segment index `j`.
    pub fn local(&self, j: usize, omega: f64) -> Complex64 {
        assert!(j >= 1 && j <= self.partition.len(), "segment index out of range");
        local_raw(&self.samples, &self.table, self.partition.points[j - 1], omega)
            / self.c[j - 1].sqrt()
    }

    /// `S_j(omega) = sqrt(c_j) conj(L_j(omega))`, the sample-side
    /// approximation of `f_omega(p_j + omega)`.
    pub fn local_target(&self, j: usize, omega: f64) -> Complex64 {
        assert!(j >= 1 && j <= self.partition.len(), "segment index out of range");
        local_raw(&self.samples, &self.table, self.partition.points[j - 1], omega).conj()
    }

    /// Segment index (1-based, in `1 .. J-1`) whose half-open interval
    /// `(p_j, p_{j+1}]` contains `t`, clamped at the ends.
    fn segment(&self, t: f64) -> usize {
        let pts = &self.partition.points;
        if t <= pts[0] {
            return 1;
        }
        match pts.binary_search_by(|p| p.partial_cmp(&t).unwrap()) {
            Ok(i) => i.max(1).min(pts.len() - 1),
            Err(i) => i.min(pts.len() - 1),
        }
    }

    /// Evaluate `R(t)`.
    pub fn eval(&self, t: f64) -> Complex64 {
        let pts = &self.partition.points;
        let span = pts[pts.len() - 1] - pts[0];
        // Tolerate round-off at the endpoints so that evaluation grids built
        // with `lo + i * step` arithmetic still hit the covered interval.
        let tol = 1e-9 * span.max(1.0);
        if self.zero_outside && (t < pts[0] - tol || t > pts[pts.len() - 1] + tol) {
            return Complex64::new(0.0, 0.0);
        }
        let j = self.segment(t);
        self.prefix[j - 1] * self.local(j, t - pts[j - 1])
    }

    pub fn samples(&self) -> &SampleMatrix {
        &self.samples
    }

    pub fn table(&self) -> &DualGeneratorTable {
        &self.table
    }
}

/// Run the reconstruction routine on a known partition.
///
/// Fails with [`Error::IllDefined`] when some `c_j` is not positive and with
/// [`Error::PhaseUndefined`] when some `L_j` vanishes at the gap, in which
/// case the synchronization phase does not exist.
pub fn reconstruct(
    samples: &SampleMatrix,
    table: &DualGeneratorTable,
    partition: &Partition,
) -> Result<Reconstruction> {
    let j_total = partition.len();
    let mut c = Vec::with_capacity(j_total);
    for (idx, &p) in partition.points.iter().enumerate() {
        let cj = modulus_sq_approx(samples, table, p);
        if !(cj > 0.0) {
            return Err(Error::IllDefined { index: idx + 1, value: cj });
        }
        c.push(cj);
    }
    let mut nu = Vec::with_capacity(j_total - 1);
    let mut prefix = Vec::with_capacity(j_total - 1);
    let mut running = Complex64::new(1.0, 0.0);
    for j in 1..j_total {
        prefix.push(running);
        let gap = partition.points[j] - partition.points[j - 1];
        let l = local_raw(samples, table, partition.points[j - 1], gap) / c[j - 1].sqrt();
        let norm = l.norm();
        if norm == 0.0 {
            return Err(Error::PhaseUndefined { index: j });
        }
        let nu_j = l / norm;
        nu.push(nu_j);
        running *= nu_j;
    }
    Ok(Reconstruction {
        partition: partition.clone(),
        c,
        nu,
        prefix,
        zero_outside: false,
        samples: samples.clone(),
        table: table.clone(),
    })
}

/// Detect a partition from the samples alone: keep grid points of `[-s, s]`
/// where the modulus-squared approximation reaches `gamma_tilde`, thin
/// left-to-right (an interior point is dropped while its neighbors are within
/// `r` of each other), and return the first maximal run with gaps at most `r`.
pub fn detect_partition(
    samples: &SampleMatrix,
    table: &DualGeneratorTable,
    s: f64,
    r: f64,
    gamma: f64,
    gamma_tilde: f64,
    grid_step: Option<f64>,
) -> Result<Partition> {
    if !(s > 0.0 && r > 0.0 && gamma > 0.0 && gamma_tilde > 0.0) {
        return Err(Error::Argument("detection needs positive s, r, gamma, gamma_tilde".into()));
    }
    let step = match grid_step {
        Some(v) if v > 0.0 => v,
        Some(v) => return Err(Error::Argument(format!("grid_step must be positive, got {v}"))),
        None => samples.grid.beta / 10.0,
    };
    let mut pts = Vec::new();
    let count = (2.0 * s / step).round() as usize;
    for i in 0..=count {
        let t = -s + i as f64 * step;
        if modulus_sq_approx(samples, table, t) >= gamma_tilde {
            pts.push(t);
        }
    }
    if pts.is_empty() {
        return Err(Error::NoAdmissiblePoint);
    }
    // Thin to a fixed point: remove the first interior point whose removal
    // keeps the local gap within r, then restart.
    loop {
        let mut removed = false;
        for m in 1..pts.len().saturating_sub(1) {
            if pts[m + 1] - pts[m - 1] <= r {
                pts.remove(m);
                removed = true;
                break;
            }
        }
        if !removed {
            break;
        }
    }
    // First maximal run with gaps <= r that still has at least two points.
    let mut best_len = 1usize;
    let mut start = 0usize;
    let mut i = 0usize;
    while i < pts.len() {
        let mut end = i;
        while end + 1 < pts.len() && pts[end + 1] - pts[end] <= r * (1.0 + 1e-12) {
            end += 1;
        }
        let len = end - i + 1;
        if len >= 2 {
            start = i;
            best_len = len;
            break;
        }
        best_len = best_len.max(len);
        i = end + 1;
    }
    if best_len < 2 {
        return Err(Error::PartitionTooShort { found: best_len });
    }
    Partition::new(pts[start..start + best_len].to_vec(), gamma, r)
}

/// The full detection pipeline: find a partition with threshold
/// `gamma_tilde = (3/2) gamma^2`, reconstruct on it, and return the result
/// with `R = 0` outside `[p_1, p_J]`.
pub fn auto_reconstruct(
    samples: &SampleMatrix,
    table: &DualGeneratorTable,
    s: f64,
    r: f64,
    gamma: f64,
    grid_step: Option<f64>,
) -> Result<Reconstruction> {
    let gamma_tilde = 1.5 * gamma * gamma;
    let partition = detect_partition(samples, table, s, r, gamma, gamma_tilde, grid_step)?;
    let mut rec = reconstruct(samples, table, &partition)?;
    rec.zero_outside = true;
    Ok(rec)
}

/// `E_j(omega) = |f_omega(p_j + omega) - S_j(omega)|`, the local coefficient
/// error of the reconstruction against the ground truth.
pub fn error_term(f: &SIVSignal, rec: &Reconstruction, j: usize, omega: f64) -> f64 {
    let p = rec.partition.points[j - 1];
    (f.tensor_eval(omega, p + omega) - rec.local_target(j, omega)).norm()
}

/// Inputs of the certified four-term bound on `E_j(omega)`.
#[derive(Debug, Clone, Copy)]
pub struct ErrorBoundInputs {
    pub model: GaussianModel,
    /// Decay envelope `|Finv Lambda(t)| <= K e^{-nu |t|}`.
    pub decay: DecayConstants,
    pub omega: f64,
    /// Lattice margin `m`: number of `beta/2` steps between the evaluation
    /// region and the lattice edge.
    pub margin: usize,
    pub h: f64,
    pub freq_half: usize,
    pub c_inf: f64,
    /// Realized (or budgeted) noise norm: max absolute row sum of `eta`.
    pub noise_inf: f64,
}

/// The four contributions to the bound on `E_j(omega)`: lattice truncation,
/// trapezoid aliasing tail, frequency cutoff, and noise.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ErrorBoundTerms {
    pub lattice: f64,
    pub trapezoid_tail: f64,
    pub frequency_cutoff: f64,
    pub noise: f64,
}

impl ErrorBoundTerms {
    pub fn total(&self) -> f64 {
        self.lattice + self.trapezoid_tail + self.frequency_cutoff + self.noise
    }
}

/// Evaluate the certified bound `E_j(omega) <= T_lattice + T_trapezoid +
/// T_cutoff + T_noise`:
///
/// ```text
/// T_lattice   = 4 sqrt(pi) K E (sigma/(nu beta)) Q |c|^2 e^{-nu beta m / 2}
/// T_trapezoid = 2 sqrt(pi) K e^{omega^2/(4 sigma^2) + |omega|/sigma + 1}
///               sigma (2 + 4/(nu beta)) Q |c|^2 / (e^{1/(sigma h)} - 1)
/// T_cutoff    = sqrt(pi) K E sigma (2 + 4/(nu beta)) Q |c|^2 e^{-2 (pi H h sigma)^2}
/// T_noise     = sqrt(2) K E (2 + 4/(nu beta)) h |eta|
/// ```
///
/// with `E = e^{omega^2/(4 sigma^2)}` and
/// `Q = (1 + (sigma/beta) 2 sqrt(2 pi))^2`.
pub fn error_bound_terms(inp: &ErrorBoundInputs) -> ErrorBoundTerms {
    let sigma = inp.model.sigma;
    let beta = inp.model.beta;
    let k = inp.decay.k;
    let nu = inp.decay.nu;
    let c2 = inp.c_inf * inp.c_inf;
    let q = {
        let base = 1.0 + (sigma / beta) * 2.0 * (2.0 * PI).sqrt();
        base * base
    };
    let e_amp = (inp.omega * inp.omega / (4.0 * sigma * sigma)).exp();
    let spread = 2.0 + 4.0 / (nu * beta);

    let lattice = 4.0 * PI.sqrt() * k * e_amp * (sigma / (nu * beta)) * q * c2
        * (-nu * beta * inp.margin as f64 / 2.0).exp();
    let trapezoid_tail = 2.0
        * PI.sqrt()
        * k
        * (inp.omega * inp.omega / (4.0 * sigma * sigma) + inp.omega.abs() / sigma + 1.0).exp()
        * sigma
        * spread
        * q
        * c2
        / ((1.0 / (sigma * inp.h)).exp() - 1.0);
    let frequency_cutoff = PI.sqrt() * k * e_amp * sigma * spread * q * c2
        * (-2.0 * (PI * inp.freq_half as f64 * inp.h * sigma).powi(2)).exp();
    let noise = std::f64::consts::SQRT_2 * k * e_amp * spread * inp.h * inp.noise_inf;
    ErrorBoundTerms { lattice, trapezoid_tail, frequency_cutoff, noise }
}

// ---------------------------------------------------------------------------
// Projection of generic signals
// ---------------------------------------------------------------------------

/// `P_omega(g) = sum_n (h sum_k S(n,k) e^{-2 pi i omega h k}) T_{(beta/2) n}
/// phi~_omega`, the biorthogonal projection of the tensor product `g_omega`
/// onto the shift-invariant tensor space, computed from samples alone.
#[derive(Debug, Clone)]
pub struct TensorProjection {
    pub omega: f64,
    /// Coefficient of `T_{(beta/2) n} phi~_omega` for `n = -N .. N`.
    pub coeffs: Vec<Complex64>,
    model: GaussianModel,
    table: DualGeneratorTable,
}

impl TensorProjection {
    #[inline]
    pub fn coeff(&self, n: i64) -> Complex64 {
        let half = (self.coeffs.len() as i64 - 1) / 2;
        self.coeffs[(n + half) as usize]
    }

    pub fn time_half(&self) -> i64 {
        (self.coeffs.len() as i64 - 1) / 2
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let half = self.time_half();
        let mut acc = Complex64::new(0.0, 0.0);
        for n in -half..=half {
            let w = dual_tensor_eval(
                t - self.model.beta * n as f64 / 2.0,
                self.omega,
                &self.model,
                &self.table,
            );
            if w != 0.0 {
                acc += self.coeff(n) * w;
            }
        }
        acc
    }
}

/// Project a sampled signal onto the tensor space at shift `omega`.
///
/// `band_limit` is the caller's certificate on the frequency content `a` of
/// the signal (its tensor products must be effectively band-limited to
/// `[-a - 1/(2h'), ...]` aliasing scales); the hypothesis `a h <= 1/4` keeps
/// the trapezoid sums alias-free and is rejected otherwise.
pub fn project_tensor(
    samples: &SampleMatrix,
    table: &DualGeneratorTable,
    omega: f64,
    band_limit: f64,
) -> Result<TensorProjection> {
    if !(band_limit > 0.0) {
        return Err(Error::Argument(format!("band limit must be positive, got {band_limit}")));
    }
    if band_limit * samples.grid.h > 0.25 + 1e-12 {
        return Err(Error::Hypothesis(format!(
            "projection needs a h <= 1/4, got a = {band_limit}, h = {}",
            samples.grid.h
        )));
    }
    let grid = &samples.grid;
    let n_half = grid.time_half as i64;
    let k_half = grid.freq_half as i64;
    let mut coeffs = Vec::with_capacity(grid.rows());
    for n in -n_half..=n_half {
        let row = samples.row(n);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, v) in row.iter().enumerate() {
            let k = j as i64 - k_half;
            acc += v * Complex64::from_polar(1.0, -2.0 * PI * omega * grid.h * k as f64);
        }
        coeffs.push(grid.h * acc);
    }
    Ok(TensorProjection { omega, coeffs, model: samples.model(), table: table.clone() })
}

// ---------------------------------------------------------------------------
// Exact-tensor oracle
// ---------------------------------------------------------------------------

/// The reconstruction routine driven by exact tensor values of the ground
/// truth instead of sample sums: `c_j = |f(p_j)|^2` and
/// `L_j(omega) = conj(f_omega(p_j + omega)) / |f(p_j)|`, synchronized with
/// the same phase chain. It equals `conj(f(p_1)) / |f(p_1)|` times `f`.
#[derive(Debug, Clone)]
pub struct ExactRoutine {
    pub partition: Partition,
    pub c: Vec<f64>,
    pub prefix: Vec<Complex64>,
    f: SIVSignal,
}

impl ExactRoutine {
    fn local(&self, j: usize, omega: f64) -> Complex64 {
        let p = self.partition.points[j - 1];
        self.f.tensor_eval(omega, p + omega).conj() / self.c[j - 1].sqrt()
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let pts = &self.partition.points;
        let j = if t <= pts[0] {
            1
        } else {
            match pts.binary_search_by(|p| p.partial_cmp(&t).unwrap()) {
                Ok(i) => i.max(1).min(pts.len() - 1),
                Err(i) => i.min(pts.len() - 1),
            }
        };
        self.prefix[j - 1] * self.local(j, t - pts[j - 1])
    }
}

/// Build the exact-tensor oracle routine on a partition.
pub fn exact_tensor_routine(f: &SIVSignal, partition: &Partition) -> Result<ExactRoutine> {
    let mut c = Vec::with_capacity(partition.len());
    for (idx, &p) in partition.points.iter().enumerate() {
        let cj = f.eval(p).norm_sqr();
        if !(cj > 0.0) {
            return Err(Error::IllDefined { index: idx + 1, value: cj });
        }
        c.push(cj);
    }
    let mut prefix = Vec::with_capacity(partition.len() - 1);
    let mut running = Complex64::new(1.0, 0.0);
    let routine = ExactRoutine { partition: partition.clone(), c, prefix: Vec::new(), f: f.clone() };
    for j in 1..partition.len() {
        prefix.push(running);
        let gap = partition.points[j] - partition.points[j - 1];
        let l = routine.local(j, gap);
        let norm = l.norm();
        if norm == 0.0 {
            return Err(Error::PhaseUndefined { index: j });
        }
        running *= l / norm;
    }
    Ok(ExactRoutine { prefix, ..routine })
}

/// Summary of a reconstruction for JSON export.
#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionSummary {
    pub partition: Vec<f64>,
    pub gamma: f64,
    pub r: f64,
    pub c: Vec<f64>,
    pub nu: Vec<[f64; 2]>,
    pub zero_outside: bool,
}

impl Reconstruction {
    pub fn summary(&self) -> ReconstructionSummary {
        ReconstructionSummary {
            partition: self.partition.points.clone(),
            gamma: self.partition.gamma,
            r: self.partition.r,
            c: self.c.clone(),
            nu: self.nu.iter().map(|v| [v.re, v.im]).collect(),
            zero_outside: self.zero_outside,
        }
    }
}
