//! Full noiseless pipeline: draw a random signal, choose grid parameters for
//! a target accuracy, sample its spectrogram on the lattice, reconstruct up
//! to a global phase, and compare the result against the ground truth and
//! the closed-form error bound.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sivphase::cli::random_signal;
use sivphase::metrics::{quotient_distance, reconstruction_error_bound};
use sivphase::reconstruct::{reconstruct, Partition};
use sivphase::sampling::{select_grid_params, NoiseSpec, SampleMatrix};
use sivphase::GaussianModel;

fn main() {
    let model = GaussianModel::new(1.0 / (2.0 * std::f64::consts::PI).sqrt(), 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = random_signal(model, 9, [0.7, 1.4], &mut rng).unwrap();

    // Partition: points where |f| >= gamma with gaps at most r.
    let (gamma, r, s, eps) = (0.5, 0.75, 4.0, 1e-3);
    let mut pts: Vec<f64> = Vec::new();
    for i in 0..=(2.0 * s / 0.05) as i64 {
        let t = -s + 0.05 * i as f64;
        if f.eval(t).norm() >= gamma && pts.last().map_or(true, |&p| t - p >= 0.4) {
            pts.push((t * 100.0).round() / 100.0);
        }
    }
    let partition = Partition::new(pts, gamma, r).unwrap();
    println!("partition: {:?}", partition.points);

    // Grid plan for the target accuracy.
    let plan =
        select_grid_params(&model, r, s, gamma, eps, partition.points.len(), f.c_inf, None)
            .unwrap();
    let grid = plan.grid(model.beta).unwrap();
    println!(
        "plan: h = {:.5}, H = {}, N = {} -> {} spectrogram samples",
        grid.h,
        grid.freq_half,
        grid.time_half,
        grid.rows() * grid.cols()
    );

    let samples = SampleMatrix::sample_siv(&f, grid, &NoiseSpec::None).unwrap();
    let table = model.tensor_dual_table(1e-13).unwrap();
    let rec = reconstruct(&samples, &table, &partition).unwrap();

    // Phase-invariant error on [p_1, p_J].
    let (p1, pj) = (partition.points[0], *partition.points.last().unwrap());
    let qd = quotient_distance(|t| f.eval(t), |t| rec.eval(t), p1, pj, 0.01);
    let f_sup = f.sup_norm(f.extent().0, f.extent().1, 0.01);
    let bound = reconstruction_error_bound(eps, gamma, f_sup);
    println!("quotient distance to ground truth: {:.3e}", qd.distance);
    println!("closed-form bound at eps = {eps}:   {bound:.3e}");

    println!();
    println!("{:>6} {:>24} {:>24}", "t", "f(t)", "tau R(t)");
    let tau: Complex64 = qd.tau;
    let mut t = p1;
    while t <= pj + 1e-9 {
        let fv = f.eval(t);
        let rv = tau * rec.eval(t);
        println!("{t:>6.2} {:>11.6} {:+.6}i {:>11.6} {:+.6}i", fv.re, fv.im, rv.re, rv.im);
        t += 0.5;
    }
}
