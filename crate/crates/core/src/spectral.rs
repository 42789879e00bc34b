//! FFT plans and wavenumber tables for the uniform periodic grid.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Cached transforms for one grid size, plus the wavenumber tables used for
/// differentiation and the kinetic phase.
pub struct SpectralOps {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    k_deriv: Vec<f64>,
    k_sq: Vec<f64>,
}

impl SpectralOps {
    pub fn new(n: usize, half_width: f64) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let dk = PI / half_width;
        let mut k_deriv = Vec::with_capacity(n);
        let mut k_sq = Vec::with_capacity(n);
        for m in 0..n {
            let signed = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
            let k = dk * signed;
            k_sq.push(k * k);
            // Nyquist mode carries no usable sign for odd derivatives
            k_deriv.push(if m == n / 2 { 0.0 } else { k });
        }
        SpectralOps { n, fwd, inv, k_deriv, k_sq }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Squared wavenumbers in transform order (Nyquist included).
    pub fn k_squared(&self) -> &[f64] {
        &self.k_sq
    }

    /// Unnormalized forward transform, in place.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.fwd.process(buf);
    }

    /// Inverse transform, in place, scaled by `1/n` so that
    /// `inverse_scaled(forward(x)) == x` up to rounding.
    pub fn inverse_scaled(&self, buf: &mut [Complex64]) {
        self.inv.process(buf);
        let scale = 1.0 / self.n as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }

    /// Spectral first derivative of the sampled function.
    pub fn derivative(&self, values: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.n);
        let mut buf = values.to_vec();
        self.fwd.process(&mut buf);
        for (v, &k) in buf.iter_mut().zip(&self.k_deriv) {
            *v *= Complex64::new(0.0, k);
        }
        self.inverse_scaled(&mut buf);
        buf
    }
}

/// One-off spectral derivative; builds plans on each call, so prefer holding
/// a [`SpectralOps`] in loops.
pub fn derivative(values: &[Complex64], half_width: f64) -> Vec<Complex64> {
    SpectralOps::new(values.len(), half_width).derivative(values)
}
