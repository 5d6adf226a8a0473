//! Seeded initial data.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SqgError};
use crate::spectral::{sobolev_norm, GridSpec, SpectralField};

/// Random mean-free data with |θ̂(k)| ∝ |k|^{-slope} on `k_min ≤ |k| ≤ k_max`.
///
/// Coefficients are complex Gaussians times the power law, symmetrized so the
/// field is real. `k_max` is clipped to the dealias radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub slope: f64,
    pub k_min: f64,
    pub k_max: f64,
}

impl PowerLaw {
    pub fn new(slope: f64, k_min: f64, k_max: f64) -> Self {
        Self { slope, k_min, k_max }
    }

    pub fn sample(&self, grid: GridSpec, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k_hi = self.k_max.min(grid.dealias_radius());
        let lo = self.k_min.max(f64::MIN_POSITIVE);
        let slope = self.slope;
        random_hermitian(
            grid,
            &mut rng,
            |r| {
                if r >= lo && r <= k_hi {
                    r.powf(-slope)
                } else {
                    0.0
                }
            },
        )
    }
}

/// Gaussian coefficients times a radial amplitude, made Hermitian.
///
/// Modes are visited in storage order and each ± pair consumes one draw, so
/// output depends only on the RNG state.
pub fn random_hermitian<R: rand::Rng>(grid: GridSpec, rng: &mut R, amplitude: impl Fn(f64) -> f64) -> SpectralField {
    let n = grid.n();
    let k = grid.wavenumbers();
    let mut out = SpectralField::zeros(grid);
    let c = out.coeffs_mut();
    for i1 in 0..n {
        let j1 = grid.mirror(i1);
        for i2 in 0..n {
            let j2 = grid.mirror(i2);
            let a = amplitude(k[i1].hypot(k[i2]));
            if a == 0.0 {
                continue;
            }
            let own = i1 * n + i2;
            let partner = j1 * n + j2;
            if partner < own {
                continue;
            }
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            if partner == own {
                c[[i1, i2]] = Complex64::new(re * a, 0.0);
            } else {
                let z = Complex64::new(re, im) * (a * std::f64::consts::FRAC_1_SQRT_2);
                c[[i1, i2]] = z;
                c[[j1, j2]] = z.conj();
            }
        }
    }
    out
}

/// Rescales `field` to unit H^r (or Ḣ^r) norm.
pub fn normalize_sobolev(field: &SpectralField, r: f64, homogeneous: bool) -> Result<SpectralField> {
    let nrm = sobolev_norm(field, r, homogeneous)?;
    if nrm == 0.0 {
        return Err(SqgError::DegenerateSample("cannot normalize a zero field".into()));
    }
    Ok(field.scaled(1.0 / nrm))
}
