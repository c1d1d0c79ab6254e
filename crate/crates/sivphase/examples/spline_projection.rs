//! Projection of a signal from outside the model space: the same lattice of
//! spectrogram samples, applied to a compactly supported spline, produces the
//! orthogonal projection of its tensor products onto the shift-invariant
//! space — provided the support radius a and frequency step h satisfy
//! a h <= 1/4.

use num_complex::Complex64;
use sivphase::quad::adaptive_simpson_complex;
use sivphase::reconstruct::project_tensor;
use sivphase::sampling::{Grid, NoiseSpec, SampleMatrix};
use sivphase::signal::{phi_omega, GenericSignal};
use sivphase::GaussianModel;

fn main() {
    let model = GaussianModel::new(0.1, 0.1).unwrap();
    let table = model.tensor_dual_table(1e-12).unwrap();

    // A smooth complex spline supported on [-5, 5].
    let knots: Vec<f64> = (0..=40).map(|k| -5.0 + 0.25 * k as f64).collect();
    let values: Vec<Complex64> = knots
        .iter()
        .map(|&t| Complex64::from_polar((1.0 - t * t / 25.0) * (-t * t / 6.0).exp(), 1.1 * t))
        .collect();
    let spline = GenericSignal::spline(knots, values).unwrap();

    // Support radius 5 and h = 1/20 meet the hypothesis a h = 1/4.
    let grid = Grid::new(0.1, 0.05, 120, 150).unwrap();
    println!("sampling the spline spectrogram on a {} x {} lattice...", grid.rows(), grid.cols());
    let samples =
        SampleMatrix::sample_generic(&spline, &model, grid, &NoiseSpec::None, 1e-9).unwrap();

    for omega in [0.0f64, 0.04] {
        let proj = project_tensor(&samples, &table, omega, 5.0).unwrap();
        println!();
        println!("omega = {omega}: orthogonality residuals <g_w - P g_w, T_x phi_w>");
        for n in -3i64..=3 {
            let shift = model.beta * n as f64 / 2.0;
            let residual = adaptive_simpson_complex(
                |t| {
                    (spline.tensor_eval(omega, t) - proj.eval(t))
                        * phi_omega(&model, omega, t - shift)
                },
                -6.5,
                6.5,
                1e-9,
            )
            .unwrap();
            println!("  x = {shift:>5.2}: |residual| = {:.3e}", residual.norm());
        }
    }
    println!();
    println!("all residuals vanish to sampling accuracy: the lattice data determine");
    println!("the orthogonal projection even for signals outside the model space.");
}
