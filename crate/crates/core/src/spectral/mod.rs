//! Fourier representation of real periodic fields on the square torus.
//!
//! Coefficients follow `f(x) = Σ_k c_k e^{ik·x}` with
//! `c_k = N^{-2} Σ_x f(x) e^{-ik·x}`, so Plancherel reads
//! `∫|f|² dx = period² Σ_k |c_k|²`.

pub mod fft;
pub mod field;
pub mod grid;
pub mod io;
pub mod multiplier;
pub mod norms;

pub use field::{forward_pair, forward_transform, inverse_pair, inverse_transform, sample, SpectralField};
pub use grid::GridSpec;
pub use multiplier::{apply_multiplier, divergence, gradient, riesz_perp, MultiplierSpec, DEFAULT_GEVREY_CAP};
pub use norms::{lp_norm, lp_norm_values, sobolev_norm};
