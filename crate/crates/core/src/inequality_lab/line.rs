//! One-dimensional periodic helpers for the line-based checks.

use num_complex::Complex64;

use crate::spectral::fft::fft1;

/// c_k = N⁻¹Σ f(x_i)e^{-ikx_i}, in storage order.
pub(crate) fn coefficients(samples: &[f64]) -> Vec<Complex64> {
    let n = samples.len() as f64;
    let mut data: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft1(&mut data, false);
    data.iter_mut().for_each(|c| *c /= n);
    data
}

/// Wavenumber of storage index `i` on an `n`-point grid of length `period`.
pub(crate) fn wavenumber(i: usize, n: usize, period: f64) -> f64 {
    let m = if i < n / 2 { i as f64 } else { i as f64 - n as f64 };
    m * std::f64::consts::TAU / period
}

/// A trigonometric polynomial Σ c e^{iξx} over a short list of modes.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SparseSeries {
    pub modes: Vec<(f64, Complex64)>,
}

impl SparseSeries {
    /// Keeps coefficients above `rel_tol` times the largest one.
    pub fn from_coefficients(c: &[Complex64], period: f64, rel_tol: f64) -> Self {
        let n = c.len();
        let cmax = c.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        let modes = c
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > rel_tol * cmax)
            .map(|(i, z)| (wavenumber(i, n, period), *z))
            .collect();
        Self { modes }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.modes
            .iter()
            .map(|&(k, c)| (c * Complex64::from_polar(1.0, k * x)).re)
            .sum()
    }

    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        Self {
            modes: self.modes.iter().map(|&(k, c)| (k, f(k, c))).collect(),
        }
    }
}
