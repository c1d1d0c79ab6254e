//! Build the dual generator of a Gaussian on a lattice and check its two
//! defining properties: biorthogonality against the Gaussian translates and
//! exponential decay of the mixture.
//!
//! The dual is phi~ = sqrt(2) Finv Lambda where Lambda is the Gaussian
//! Fourier envelope divided by a theta function; its mixture coefficients
//! come from the reciprocal-theta Fourier series.

use sivphase::quad::adaptive_simpson;
use sivphase::special::DualGeneratorTable;

fn main() {
    let (sigma_g, beta_g) = (0.4f64, 0.8f64);
    let table = DualGeneratorTable::build(sigma_g, beta_g, 1e-14).unwrap();

    println!("dual generator for phi^sigma on beta Z, sigma = {sigma_g}, beta = {beta_g}");
    println!("nome c = {:.6}, xi(c) = {:.6}", table.c, table.xi);
    println!("mixture truncated at |n| <= {}", table.max_index());
    println!();

    println!("first mixture coefficients a_n:");
    for n in 0..=5i64 {
        println!("  a_{n} = {:+.8e}", table.coeff(n));
    }
    println!();

    // Biorthogonality: <T_{beta n} phi, T_{beta k} phi~> = delta_{nk}.
    let radius = table.effective_radius() + 9.0 * sigma_g;
    println!("biorthogonality <T_bn phi, T_bk phi~> (should be the identity):");
    for n in -2i64..=2 {
        let row: Vec<String> = (-2i64..=2)
            .map(|k| {
                let ip = adaptive_simpson(
                    |t| {
                        let u = t - beta_g * n as f64;
                        (-u * u / (2.0 * sigma_g * sigma_g)).exp()
                            * table.dual_eval(t - beta_g * k as f64)
                    },
                    -radius,
                    radius,
                    1e-11,
                )
                .unwrap();
                format!("{ip:+.2e}")
            })
            .collect();
        println!("  {}", row.join("  "));
    }
    println!();

    println!("decay of the dual along the real line:");
    for t in [0.0f64, 2.0, 5.0, 10.0, 15.0] {
        println!("  |phi~({t:>4})| = {:.3e}", table.dual_eval(t).abs());
    }
}
