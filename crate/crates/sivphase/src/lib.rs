//! Phase retrieval in Gaussian shift-invariant spaces.
//!
//! Signals `f = sum_n c_n phi(. - beta n)` with a Gaussian generator
//! `phi(t) = exp(-t^2/(2 sigma^2))` are reconstructed, up to one global
//! phase, from finitely many noisy samples of the Gabor spectrogram
//! `|Gf(x, omega)|^2` on a grid `(beta/2){-N..N} x h{-H..H}`. The inversion
//! is non-iterative: spectrogram rows are expanded in a biorthogonal system
//! built from the reciprocal Jacobi theta function, local reconstructions
//! are formed around partition points where `|f|` is bounded away from zero,
//! and the pieces are phase-synchronized.
//!
//! Module map:
//! - [`special`]: theta functions, reciprocal-theta coefficients, dual
//!   generators, decay and stability constants;
//! - [`signal`]: ground-truth signals, closed-form Gabor transform and
//!   spectrogram, tensor products, quadrature spectrogram for generic signals;
//! - [`sampling`]: sample grids, noise models, sample matrices, mixed norms,
//!   grid-parameter selection and sample-count estimates;
//! - [`reconstruct`]: modulus approximation, partition detection, local
//!   reconstructions, phase synchronization, error terms and bounds,
//!   projection of generic signals;
//! - [`metrics`]: distance modulo global phase and the stability checks;
//! - [`cli`]: batch front-end (fixtures, sample matrices, reconstructions,
//!   verification suites).
//!
//! The `examples/` directory contains one runnable example per capability;
//! the `sivphase` binary exposes the same pipelines as subcommands.

pub mod cli;
pub mod error;
pub mod metrics;
pub mod model;
pub mod quad;
pub mod reconstruct;
pub mod sampling;
pub mod signal;
pub mod special;

pub use error::{Error, Result};
pub use model::GaussianModel;
