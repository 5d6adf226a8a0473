//! Pseudospectral simulator for the 2D dissipative surface quasi-geostrophic
//! equation on the periodic torus, with a Littlewood–Paley toolkit and a
//! numerical inequality verification suite.
//!
//! The equation is ∂_tθ + u·∇θ + νD^γθ = 0 with u = R^⊥θ and D = (-Δ)^{1/2}.

// `!(x > 0.0)` rejects NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fit;
pub mod inequality_lab;
pub mod initial;
pub mod littlewood_paley;
pub mod manifest;
pub mod quadrature;
pub mod solver;
pub mod spectral;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Result, SqgError};
pub use littlewood_paley::{DyadicPartition, SemigroupWeight};
pub use spectral::{GridSpec, MultiplierSpec, SpectralField};
