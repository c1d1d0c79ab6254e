//! Batch front-end: configuration, subcommands, and verification suites.
//!
//! One JSON configuration document drives all subcommands; command-line flags
//! override individual fields. Every file is written atomically (temp file in
//! the target directory, then rename), so a crashed run never leaves a
//! half-written artifact. Exit codes: 0 on success, 2 for configuration
//! errors, 3 when the algorithm's hypotheses fail on the data (ill-defined
//! modulus, undefined phase, no admissible partition point), 4 for I/O
//! problems, 1 when a verification suite ran but did not pass.

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::metrics::{
    global_stability_check, instability_ratio, local_stability_check, quotient_distance,
};
use crate::model::GaussianModel;
use crate::reconstruct::{
    auto_reconstruct, error_bound_terms, error_term, exact_tensor_routine, reconstruct,
    ErrorBoundInputs, Partition, Reconstruction,
};
use crate::sampling::{
    sample_count, select_grid_params, Grid, NoiseSpec, SampleMatrix, SampleSidecar,
};
use crate::signal::{SIVSignal, SignalFixture};
use crate::special::{decay_constants, xi, DualGeneratorTable};

/// Write `text` to `path` atomically: the content goes to a temp file in the
/// same directory, which is then renamed over the target.
pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let stem = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "file".into());
    let tmp = dir.join(format!(".{stem}.tmp-{}", std::process::id()));
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub h: f64,
    pub time_half: usize,
    pub freq_half: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionConfig {
    pub points: Vec<f64>,
    pub gamma: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectConfig {
    pub s: f64,
    pub r: f64,
    pub gamma: f64,
    #[serde(default)]
    pub grid_step: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    pub r: f64,
    pub s: f64,
    pub gamma: f64,
    pub eps: f64,
    pub j: usize,
    pub c_inf: f64,
    /// `(a, b, D)` overrides outside the explicit regime.
    #[serde(default)]
    pub overrides: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

/// The single JSON configuration document. All fields are optional; each
/// subcommand validates the ones it needs.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sigma: Option<f64>,
    pub beta: Option<f64>,
    pub seed: Option<u64>,
    /// Number of random coefficients for `synthesize`.
    pub coeff_count: Option<usize>,
    /// Magnitude range of random coefficients for `synthesize`.
    pub coeff_mag: Option<[f64; 2]>,
    pub signal_path: Option<PathBuf>,
    pub samples_path: Option<PathBuf>,
    pub grid: Option<GridConfig>,
    pub noise: Option<NoiseSpec>,
    pub partition: Option<PartitionConfig>,
    pub detect: Option<DetectConfig>,
    pub plan: Option<PlanConfig>,
    pub eval: Option<EvalConfig>,
    pub quad_tol: Option<f64>,
    pub tail_tol: Option<f64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("bad config: {e}")))
    }

    pub fn model(&self) -> Result<GaussianModel> {
        GaussianModel::new(
            self.sigma.unwrap_or(1.0 / (2.0 * PI).sqrt()),
            self.beta.unwrap_or(1.0),
        )
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol.unwrap_or(1e-12)
    }

    pub fn quad_tol(&self) -> f64 {
        self.quad_tol.unwrap_or(1e-9)
    }
}

// ---------------------------------------------------------------------------
// Command line
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleMode {
    /// Compare against the routine driven by exact tensor values of the
    /// ground truth (needs a signal fixture).
    ExactTensor,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Stability,
    ErrorBounds,
    Growth,
    SpecialFunctions,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Stability => "stability",
            Suite::ErrorBounds => "error-bounds",
            Suite::Growth => "growth",
            Suite::SpecialFunctions => "special-functions",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sivphase", about = "Phase retrieval in Gaussian shift-invariant spaces")]
pub struct Cli {
    /// JSON configuration document; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override the seed in the config and noise spec.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory for all artifacts.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random signal fixture in the shift-invariant space.
    Synthesize,
    /// Sample the spectrogram of a signal fixture on a grid (plus noise).
    Sample,
    /// Reconstruct a signal from a sample matrix and export a dense trace.
    Reconstruct {
        #[arg(long, value_enum, default_value_t = OracleMode::None)]
        oracle: OracleMode,
    },
    /// Run a verification suite and write its report.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
    },
    /// Derive grid parameters and noise budgets for a target accuracy.
    Plan,
}

/// Map an error to the process exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::IllDefined { .. }
        | Error::PhaseUndefined { .. }
        | Error::NoAdmissiblePoint
        | Error::PartitionTooShort { .. } => 3,
        Error::Io(_) | Error::Parse(_) => 4,
        _ => 2,
    }
}

/// Run a parsed command line; returns the exit code on success paths that can
/// still fail a verification (the `verify` subcommand).
pub fn run(cli: Cli) -> Result<i32> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = Some(seed);
        if let Some(noise) = &mut config.noise {
            match noise {
                NoiseSpec::Gaussian { seed: s, .. } => *s = seed,
                NoiseSpec::AdversarialRowSum { seed: s, .. } => *s = seed,
                NoiseSpec::None => {}
            }
        }
    }
    match cli.command {
        Command::Synthesize => {
            cmd_synthesize(&config, &cli.out)?;
            Ok(0)
        }
        Command::Sample => {
            cmd_sample(&config, &cli.out)?;
            Ok(0)
        }
        Command::Reconstruct { oracle } => {
            cmd_reconstruct(&config, &cli.out, oracle)?;
            Ok(0)
        }
        Command::Verify { suite } => cmd_verify(&config, &cli.out, suite),
        Command::Plan => {
            cmd_plan(&config, &cli.out)?;
            Ok(0)
        }
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

/// Draw a random signal with coefficients of uniform magnitude and phase.
pub fn random_signal(
    model: GaussianModel,
    count: usize,
    mag: [f64; 2],
    rng: &mut ChaCha8Rng,
) -> Result<SIVSignal> {
    if count == 0 {
        return Err(Error::Config("coeff_count must be at least 1".into()));
    }
    let n_min = -((count as i64 - 1) / 2);
    let coeffs = (0..count)
        .map(|_| {
            Complex64::from_polar(rng.gen_range(mag[0]..=mag[1]), rng.gen_range(0.0..2.0 * PI))
        })
        .collect();
    SIVSignal::new(model, n_min, coeffs)
}

pub fn cmd_synthesize(config: &ExperimentConfig, out: &Path) -> Result<PathBuf> {
    let model = config.model()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.unwrap_or(0));
    let count = config.coeff_count.unwrap_or(9);
    let mag = config.coeff_mag.unwrap_or([0.5, 1.5]);
    if !(mag[0] > 0.0 && mag[1] >= mag[0]) {
        return Err(Error::Config(format!("coeff_mag must satisfy 0 < lo <= hi, got {mag:?}")));
    }
    let f = random_signal(model, count, mag, &mut rng)?;
    let path = out.join("signal.json");
    SignalFixture::from_siv(&f).save(&path)?;
    println!("wrote {} ({} coefficients, sigma = {}, beta = {})", path.display(), count, model.sigma, model.beta);
    Ok(path)
}

fn load_signal(config: &ExperimentConfig, out: &Path) -> Result<SIVSignal> {
    let path = config
        .signal_path
        .clone()
        .unwrap_or_else(|| out.join("signal.json"));
    SignalFixture::load(&path)?.as_siv()
}

fn resolve_grid(config: &ExperimentConfig, model: &GaussianModel) -> Result<Grid> {
    if let Some(g) = &config.grid {
        return Grid::new(model.beta, g.h, g.time_half, g.freq_half);
    }
    if let Some(p) = &config.plan {
        let plan = select_grid_params(
            model,
            p.r,
            p.s,
            p.gamma,
            p.eps,
            p.j,
            p.c_inf,
            p.overrides.map(|o| (o[0], o[1], o[2])),
        )?;
        return plan.grid(model.beta);
    }
    Err(Error::Config("sampling needs a `grid` or a `plan` in the config".into()))
}

pub fn cmd_sample(config: &ExperimentConfig, out: &Path) -> Result<PathBuf> {
    let f = load_signal(config, out)?;
    let grid = resolve_grid(config, &f.model)?;
    let noise = config.noise.unwrap_or(NoiseSpec::None);
    let samples = SampleMatrix::sample_siv(&f, grid, &noise)?;
    let path = out.join("samples.csv");
    samples.write_csv(&path)?;
    SampleSidecar {
        noise,
        noise_inf_norm_actual: samples.noise_inf_norm_actual,
        signal_ref: config
            .signal_path
            .clone()
            .or_else(|| Some(out.join("signal.json")))
            .map(|p| p.display().to_string()),
    }
    .save(&path)?;
    println!(
        "wrote {} ({}x{} samples, noise |eta| = {:.3e})",
        path.display(),
        grid.rows(),
        grid.cols(),
        samples.noise_inf_norm_actual
    );
    Ok(path)
}

fn resolve_reconstruction(
    config: &ExperimentConfig,
    samples: &SampleMatrix,
    table: &DualGeneratorTable,
) -> Result<Reconstruction> {
    if let Some(p) = &config.partition {
        let partition = Partition::new(p.points.clone(), p.gamma, p.r)?;
        return reconstruct(samples, table, &partition);
    }
    if let Some(d) = &config.detect {
        return auto_reconstruct(samples, table, d.s, d.r, d.gamma, d.grid_step);
    }
    Err(Error::Config("reconstruction needs a `partition` or a `detect` block".into()))
}

pub fn cmd_reconstruct(config: &ExperimentConfig, out: &Path, oracle: OracleMode) -> Result<PathBuf> {
    let samples_path = config
        .samples_path
        .clone()
        .unwrap_or_else(|| out.join("samples.csv"));
    let mut samples = SampleMatrix::read_csv(&samples_path)?;
    if let Ok(meta) = SampleSidecar::load(&samples_path) {
        samples.noise_inf_norm_actual = meta.noise_inf_norm_actual;
    }
    let model = samples.model();
    let table = model.tensor_dual_table(config.tail_tol())?;
    let rec = resolve_reconstruction(config, &samples, &table)?;

    // ground truth is optional: explicit path must exist, the default path
    // may be absent
    let truth: Option<SIVSignal> = match &config.signal_path {
        Some(p) => Some(SignalFixture::load(p)?.as_siv()?),
        None => {
            let default = out.join("signal.json");
            if default.exists() {
                Some(SignalFixture::load(&default)?.as_siv()?)
            } else {
                None
            }
        }
    };

    let pts = &rec.partition.points;
    // default to the partition span: the detection pipeline pins R to zero
    // outside it
    let (lo, hi, step) = match &config.eval {
        Some(e) => (e.lo, e.hi, e.step),
        None => (pts[0], pts[pts.len() - 1], model.beta / 20.0),
    };
    if !(step > 0.0 && hi > lo) {
        return Err(Error::Config(format!("bad eval range [{lo}, {hi}] step {step}")));
    }

    let count = ((hi - lo) / step).round() as usize;
    let ts: Vec<f64> = (0..=count).map(|i| lo + i as f64 * step).collect();
    let rs: Vec<Complex64> = ts.iter().map(|&t| rec.eval(t)).collect();
    let qd = truth.as_ref().map(|f| {
        let fs: Vec<Complex64> = ts.iter().map(|&t| f.eval(t)).collect();
        let fsc = fs.clone();
        let rsc = rs.clone();
        (
            quotient_distance(
                move |t| fsc[(t.round() as usize).min(count)],
                move |t| rsc[(t.round() as usize).min(count)],
                0.0,
                count as f64,
                1.0,
            ),
            fs,
        )
    });

    let mut csv = String::from("t,re_R,im_R,re_f,im_f,abs_err_after_phase\n");
    for (i, &t) in ts.iter().enumerate() {
        match &qd {
            Some((q, fs)) => {
                let err = (fs[i] - q.tau * rs[i]).norm();
                csv.push_str(&format!(
                    "{t},{},{},{},{},{err}\n",
                    rs[i].re, rs[i].im, fs[i].re, fs[i].im
                ));
            }
            None => {
                csv.push_str(&format!("{t},{},{},,,\n", rs[i].re, rs[i].im));
            }
        }
    }
    let csv_path = out.join("reconstruction.csv");
    write_atomic(&csv_path, &csv)?;

    let oracle_deviation = match (oracle, &truth) {
        (OracleMode::ExactTensor, Some(f)) => {
            let routine = exact_tensor_routine(f, &rec.partition)?;
            let os: Vec<Complex64> = ts.iter().map(|&t| routine.eval(t)).collect();
            let osc = os;
            let rsc = rs.clone();
            let q = quotient_distance(
                move |t| osc[(t.round() as usize).min(count)],
                move |t| rsc[(t.round() as usize).min(count)],
                0.0,
                count as f64,
                1.0,
            );
            Some(q.distance)
        }
        (OracleMode::ExactTensor, None) => {
            return Err(Error::Config("exact-tensor oracle needs a signal fixture".into()))
        }
        (OracleMode::None, _) => None,
    };

    let summary = json!({
        "reconstruction": rec.summary(),
        "eval": {"lo": lo, "hi": hi, "step": step},
        "quotient_distance": qd.as_ref().map(|(q, _)| q.distance),
        "oracle_deviation": oracle_deviation,
        "noise_inf_norm": samples.noise_inf_norm_actual,
    });
    let json_path = out.join("reconstruction.json");
    write_atomic(&json_path, &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    if let Some((q, _)) = &qd {
        println!("quotient distance to ground truth: {:.6e}", q.distance);
    }
    Ok(csv_path)
}

pub fn cmd_plan(config: &ExperimentConfig, out: &Path) -> Result<PathBuf> {
    let model = config.model()?;
    let p = config
        .plan
        .as_ref()
        .ok_or_else(|| Error::Config("plan subcommand needs a `plan` block".into()))?;
    let plan = select_grid_params(
        &model,
        p.r,
        p.s,
        p.gamma,
        p.eps,
        p.j,
        p.c_inf,
        p.overrides.map(|o| (o[0], o[1], o[2])),
    )?;
    let report = json!({
        "plan": plan,
        "sigma": model.sigma,
        "beta": model.beta,
        "rows": 2 * plan.time_half + 1,
        "cols": 2 * plan.freq_half + 1,
        "detection_noise_budget": plan.detection_noise_budget(),
        "worst_case_samples": sample_count(
            &model, p.r, p.s, p.eps, p.c_inf,
            p.overrides.map(|o| (o[0], o[1], o[2])),
        )?,
    });
    let path = out.join("plan.json");
    write_atomic(&path, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    println!(
        "plan: h = {:.6}, grid {}x{}, noise budget {:.3e} -> {}",
        plan.h,
        2 * plan.time_half + 1,
        2 * plan.freq_half + 1,
        plan.noise_budget,
        path.display()
    );
    Ok(path)
}

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

/// One inequality check of a verification suite. `margin` is the signed
/// slack `rhs - lhs`; the check passes when it is nonnegative.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub passed: bool,
    pub params: serde_json::Value,
}

impl CheckRecord {
    fn new(name: &str, lhs: f64, rhs: f64, params: serde_json::Value) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            margin: rhs - lhs,
            passed: lhs <= rhs,
            params,
        }
    }
}

pub fn cmd_verify(config: &ExperimentConfig, out: &Path, suite: Suite) -> Result<i32> {
    let checks = match suite {
        Suite::SpecialFunctions => suite_special_functions()?,
        Suite::Stability => suite_stability(config)?,
        Suite::ErrorBounds => suite_error_bounds(config)?,
        Suite::Growth => suite_growth(config)?,
    };
    let passed = checks.iter().all(|c| c.passed);
    let report = json!({
        "suite": suite.name(),
        "passed": passed,
        "checks": checks,
    });
    let path = out.join(format!("report-{}.json", suite.name()));
    write_atomic(&path, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    for c in &checks {
        println!(
            "[{}] {}: lhs = {:.6e}, rhs = {:.6e}, margin = {:.3e}",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.lhs,
            c.rhs,
            c.margin
        );
    }
    println!("suite {}: {} -> {}", suite.name(), if passed { "pass" } else { "FAIL" }, path.display());
    Ok(if passed { 0 } else { 1 })
}

fn suite_special_functions() -> Result<Vec<CheckRecord>> {
    let mut checks = Vec::new();

    // xi stays above 1/5 on the nome interval of the explicit regime
    let lo = (-2.0f64).exp();
    let hi = (-0.5f64).exp();
    let mut min_xi = f64::INFINITY;
    for i in 0..100 {
        let c = lo + (hi - lo) * i as f64 / 99.0;
        min_xi = min_xi.min(xi(c)?);
    }
    checks.push(CheckRecord::new(
        "xi_lower_bound",
        0.2,
        min_xi,
        json!({"interval": [lo, hi], "points": 100}),
    ));

    // reciprocal-theta coefficients invert theta on the real line
    for (sigma_g, beta_g) in [(0.5f64, 1.0f64), (0.25, 0.5)] {
        let table = DualGeneratorTable::build(sigma_g, beta_g, 1e-14)?;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let t: f64 = rng.gen_range(-5.0..5.0);
            let mut recip = Complex64::new(0.0, 0.0);
            for n in -(table.max_index() as i64)..=(table.max_index() as i64) {
                recip += table.coeff(n)
                    * Complex64::from_polar(1.0, 2.0 * PI * beta_g * n as f64 * t);
            }
            let product = recip * crate::special::theta3_real(PI * beta_g * t, table.c);
            worst = worst.max((product - Complex64::new(1.0, 0.0)).norm());
        }
        checks.push(CheckRecord::new(
            "reciprocal_theta_inversion",
            worst,
            1e-10,
            json!({"sigma_g": sigma_g, "beta_g": beta_g}),
        ));
    }

    // certified decay envelope on [-20, 20] for three explicit-regime pairs
    for (sigma, beta) in [(0.25f64, 1.0f64), (0.4, 0.8), (0.5, 1.0)] {
        let model = GaussianModel::new(sigma, beta)?;
        let table = model.tensor_dual_table(1e-12)?;
        let mut worst_ratio = 0.0f64;
        let mut t = -20.0f64;
        while t <= 20.0 {
            let bound = (205.0 / sigma) * (-t.abs() / 4.0).exp();
            worst_ratio = worst_ratio.max(table.finv_lambda(t).abs() / bound);
            t += 0.01;
        }
        checks.push(CheckRecord::new(
            "dual_decay_envelope",
            worst_ratio,
            1.0,
            json!({"sigma": sigma, "beta": beta}),
        ));
    }
    Ok(checks)
}

fn suite_stability(config: &ExperimentConfig) -> Result<Vec<CheckRecord>> {
    let model = config.model()?;
    let mut checks = Vec::new();

    // instability ratios grow with the witness order
    let mut prev = 0.0f64;
    for n in 1..=3usize {
        let ratio = instability_ratio(model, n, 1e-10)?;
        checks.push(CheckRecord::new(
            "instability_ratio_monotone",
            prev,
            ratio,
            json!({"n": n, "ratio": ratio}),
        ));
        prev = ratio;
    }

    // local and global stability on a seeded perturbed pair
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.unwrap_or(42));
    let f = random_signal(model, 5, [0.6, 1.4], &mut rng)?;
    let mut coeffs = f.coeffs.clone();
    coeffs[2] += Complex64::new(1e-3, -1e-3);
    let g = SIVSignal::new(model, f.n_min, coeffs)?;
    let pts: Vec<f64> = (-2..=2)
        .map(|i| i as f64 * 0.7)
        .filter(|&p| f.eval(p).norm() >= 0.2 && g.eval(p).norm() >= 0.2)
        .collect();
    let partition = Partition::new(pts, 0.2, 0.8)?;
    let local = local_stability_check(&f, &g, &partition, 1e-9, 0.02)?;
    checks.push(CheckRecord::new(
        "modulus_difference_bound",
        local.modulus_lhs,
        local.modulus_rhs,
        json!({"mixed_norm": local.mixed_norm, "stability_constant": local.stability_constant}),
    ));
    for iv in &local.intervals {
        checks.push(CheckRecord::new(
            "interval_phase_bound",
            iv.lhs,
            iv.rhs,
            json!({"point": iv.point}),
        ));
    }
    let global = global_stability_check(&f, &g, &partition, 1e-9, 0.02)?;
    checks.push(CheckRecord::new(
        "global_quotient_bound",
        global.lhs,
        global.rhs_quadratic,
        json!({
            "rhs_linear": global.rhs_linear,
            "mixed_norm": global.mixed_norm,
            "stability_constant": global.stability_constant,
        }),
    ));
    Ok(checks)
}

fn suite_error_bounds(config: &ExperimentConfig) -> Result<Vec<CheckRecord>> {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.unwrap_or(7));
    for case in 0..10 {
        let sigma = rng.gen_range(0.3..0.5);
        let model = GaussianModel::new(sigma, 1.0)?;
        let f = random_signal(model, rng.gen_range(4..7), [0.8, 1.5], &mut rng)?;
        let grid = Grid::new(1.0, 1.0 / 12.0, 40, 60)?;
        let sd = 10f64.powf(rng.gen_range(-6.0..-4.0));
        let noise = NoiseSpec::Gaussian { sd, seed: rng.gen() };
        let samples = SampleMatrix::sample_siv(&f, grid, &noise)?;
        let table = model.tensor_dual_table(1e-13)?;
        // admissible points read off the ground truth
        let mut pts = Vec::new();
        let mut t = -2.0;
        let mut last = f64::NEG_INFINITY;
        while t <= 2.0 {
            if f.eval(t).norm() >= 0.4 && t - last >= 0.5 {
                pts.push(t);
                last = t;
            }
            t += 0.1;
        }
        if pts.len() < 2 {
            continue;
        }
        let partition = Partition::new(pts, 0.4, 0.8)?;
        let rec = reconstruct(&samples, &table, &partition)?;
        let decay = decay_constants(&model)?;
        let margin = ((20.0 - 3.0) / (model.beta / 2.0)).floor() as usize;
        let omega: f64 = rng.gen_range(-0.5..0.5);
        let mut worst_obs = 0.0f64;
        let mut bound = f64::INFINITY;
        for j in 1..=partition.len() {
            worst_obs = worst_obs.max(error_term(&f, &rec, j, omega));
            bound = bound.min(
                error_bound_terms(&ErrorBoundInputs {
                    model,
                    decay,
                    omega,
                    margin,
                    h: grid.h,
                    freq_half: grid.freq_half,
                    c_inf: f.c_inf,
                    noise_inf: samples.noise_inf_norm_actual,
                })
                .total(),
            );
        }
        checks.push(CheckRecord::new(
            "local_error_within_bound",
            worst_obs,
            bound,
            json!({"case": case, "sigma": sigma, "omega": omega, "noise_sd": sd}),
        ));
    }
    Ok(checks)
}

fn suite_growth(config: &ExperimentConfig) -> Result<Vec<CheckRecord>> {
    let model = config.model()?;
    // the default target accuracy is small so that the accuracy logarithm,
    // not the plan's fixed constants, drives the growth
    let (r, eps, c_inf) = match &config.plan {
        Some(p) => (p.r, p.eps, p.c_inf),
        None => (0.5, 1e-12, 1.0),
    };
    let mut ratios = Vec::new();
    let mut params = Vec::new();
    for s in [4.0f64, 8.0, 16.0, 32.0, 64.0] {
        let n = sample_count(&model, r, s, eps, c_inf, None)? as f64;
        let l = (s * c_inf * c_inf / eps).ln();
        let predicted = l.powf(1.5) * (s + l);
        ratios.push(n / predicted);
        params.push(json!({"s": s, "samples": n, "ratio": n / predicted}));
    }
    let max = ratios.iter().copied().fold(f64::MIN, f64::max);
    let min = ratios.iter().copied().fold(f64::MAX, f64::min);
    Ok(vec![CheckRecord::new(
        "sample_complexity_growth",
        max / min,
        3.0,
        json!({"r": r, "eps": eps, "c_inf": c_inf, "cases": params}),
    )])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn write_atomic_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested").join("file.txt");
        write_atomic(&path, "first").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "first");
        write_atomic(&path, "second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        // no temp files left behind
        let leftovers: Vec<_> = std::fs::read_dir(path.parent().unwrap())
            .unwrap()
            .filter(|e| e.as_ref().unwrap().file_name() != "file.txt")
            .collect();
        assert!(leftovers.is_empty());
    }

    #[test]
    fn config_defaults_and_rejects_unknown_fields() {
        let c: ExperimentConfig = serde_json::from_str("{}").unwrap();
        let model = c.model().unwrap();
        assert!((model.beta - 1.0).abs() < 1e-15);
        assert!((model.sigma - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        assert_eq!(c.tail_tol(), 1e-12);

        let bad: std::result::Result<ExperimentConfig, _> =
            serde_json::from_str(r#"{"sgima": 0.5}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn exit_codes_by_error_class() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::NoAdmissiblePoint), 3);
        assert_eq!(exit_code(&Error::IllDefined { index: 1, value: -0.1 }), 3);
        assert_eq!(exit_code(&Error::PhaseUndefined { index: 2 }), 3);
        assert_eq!(exit_code(&Error::Parse("x".into())), 4);
        assert_eq!(
            exit_code(&Error::Io(std::io::Error::new(std::io::ErrorKind::NotFound, "x"))),
            4
        );
    }

    #[test]
    fn end_to_end_pipeline() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_path_buf();
        let config = ExperimentConfig {
            seed: Some(5),
            coeff_count: Some(5),
            coeff_mag: Some([0.8, 1.5]),
            grid: Some(GridConfig { h: 1.0 / 12.0, time_half: 40, freq_half: 60 }),
            noise: Some(NoiseSpec::Gaussian { sd: 1e-4, seed: 5 }),
            detect: Some(DetectConfig { s: 4.0, r: 0.8, gamma: 0.4, grid_step: None }),
            ..Default::default()
        };
        cmd_synthesize(&config, &out).unwrap();
        cmd_sample(&config, &out).unwrap();
        cmd_reconstruct(&config, &out, OracleMode::ExactTensor).unwrap();

        let summary: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(out.join("reconstruction.json")).unwrap(),
        )
        .unwrap();
        let qd = summary["quotient_distance"].as_f64().unwrap();
        assert!(qd < 1e-2, "pipeline quotient distance {qd}");
        let oracle = summary["oracle_deviation"].as_f64().unwrap();
        assert!(oracle < 1e-2, "oracle deviation {oracle}");

        let csv = std::fs::read_to_string(out.join("reconstruction.csv")).unwrap();
        assert!(csv.starts_with("t,re_R,im_R,re_f,im_f,abs_err_after_phase\n"));
        assert!(csv.lines().count() > 10);
    }

    #[test]
    fn plan_command_writes_report() {
        let dir = tempfile::tempdir().unwrap();
        let config = ExperimentConfig {
            sigma: Some(0.25),
            beta: Some(1.0),
            plan: Some(PlanConfig {
                r: 0.5,
                s: 4.0,
                gamma: 0.5,
                eps: 1e-3,
                j: 5,
                c_inf: 1.0,
                overrides: None,
            }),
            ..Default::default()
        };
        let path = cmd_plan(&config, dir.path()).unwrap();
        let report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert!(report["plan"]["h"].as_f64().unwrap() > 0.0);
        assert!(report["worst_case_samples"].as_u64().unwrap() > 0);
    }

    #[test]
    fn verify_growth_suite_passes() {
        let dir = tempfile::tempdir().unwrap();
        let config = ExperimentConfig::default();
        let code = cmd_verify(&config, dir.path(), Suite::Growth).unwrap();
        assert_eq!(code, 0);
        let report: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("report-growth.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(report["passed"], serde_json::Value::Bool(true));
    }

    #[test]
    fn reconstruct_without_partition_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_path_buf();
        let config = ExperimentConfig {
            seed: Some(5),
            coeff_count: Some(5),
            grid: Some(GridConfig { h: 1.0 / 12.0, time_half: 40, freq_half: 60 }),
            ..Default::default()
        };
        cmd_synthesize(&config, &out).unwrap();
        cmd_sample(&config, &out).unwrap();
        let err = cmd_reconstruct(&config, &out, OracleMode::None).unwrap_err();
        assert_eq!(exit_code(&err), 2);
    }
}
