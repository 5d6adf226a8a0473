//! Pseudospectral solver for ∂_tθ + u·∇θ + νD^γθ = 0, u = R^⊥θ, and the
//! approximation schemes built on it.

pub mod config;
pub mod conservation;
pub mod diagnostics;
pub mod iterate;
pub mod mild;
pub mod rhs;
pub mod run;
pub mod stepper;

pub use config::{Integrator, SolverConfig};
pub use conservation::{conservation_report, ConservationReport, MONOTONE_SLACK};
pub use diagnostics::{sup_norm, StepRecord, TimeSample};
pub use iterate::{
    galerkin_sequence, picard_besov_sequence, picard_besov_sequence_with, IterateTrace, NormRow, Scheme, DEFAULT_S0,
};
pub use mild::mild_residual;
pub use rhs::{advection, nonlinear_term, nonlinear_term_divergence};
pub use run::{gevrey_horizon, run_simulation, simulate, step, SolverState, StepOutcome, TimeSeries};
pub use stepper::Stepper;
