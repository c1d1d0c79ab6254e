//! The Gaussian window / shift-lattice pair that all constants derive from.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Gaussian window `phi(t) = exp(-t^2 / (2 sigma^2))` together with the
/// step size `beta` of the shift lattice `beta * Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianModel {
    pub sigma: f64,
    pub beta: f64,
}

impl GaussianModel {
    pub fn new(sigma: f64, beta: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Argument(format!("sigma must be positive, got {sigma}")));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::Argument(format!("beta must be positive, got {beta}")));
        }
        Ok(Self { sigma, beta })
    }

    /// The window `phi(t) = exp(-t^2 / (2 sigma^2))`.
    #[inline]
    pub fn window(&self, t: f64) -> f64 {
        (-t * t / (2.0 * self.sigma * self.sigma)).exp()
    }

    /// True iff `beta/4 <= sigma <= beta/2 <= 1`, the parameter range in
    /// which all decay and stability constants are certified in closed form.
    pub fn explicit_regime(&self) -> bool {
        self.beta / 4.0 <= self.sigma && self.sigma <= self.beta / 2.0 && self.beta <= 2.0
    }

    /// `sigma' = 1/(2 pi sigma)`, the frequency-side Gaussian width of the
    /// spectrogram factorization.
    #[inline]
    pub fn sigma_prime(&self) -> f64 {
        1.0 / (2.0 * std::f64::consts::PI * self.sigma)
    }

    /// Theta nome for the dual generator of `phi` on `beta * Z`:
    /// `c = phi(beta / sqrt(2)) = exp(-beta^2 / (4 sigma^2))`.
    #[inline]
    pub fn generator_nome(&self) -> f64 {
        (-self.beta * self.beta / (4.0 * self.sigma * self.sigma)).exp()
    }

    /// Theta nome for the tensor-product dual generator on `(beta/2) * Z`:
    /// `c = phi(beta / 2) = exp(-beta^2 / (8 sigma^2))`.
    #[inline]
    pub fn tensor_nome(&self) -> f64 {
        (-self.beta * self.beta / (8.0 * self.sigma * self.sigma)).exp()
    }
}
