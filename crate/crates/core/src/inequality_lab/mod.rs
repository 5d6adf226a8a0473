//! Numerical checks of the harmonic analysis estimates behind the solver:
//! heat flow on dyadic blocks, coercivity, phase bounds, Gagliardo
//! seminorms, bilinear and trilinear forms. Each check returns an
//! [`InequalityReport`].

pub mod ab;
pub mod bilinear;
pub mod coercivity;
pub mod commutator;
pub mod counterexample;
pub mod gagliardo;
pub mod heat;
mod line;
pub mod mass;
pub mod phase;
pub mod report;
pub mod sampler;
pub mod trilinear;

pub use ab::{check_ab_inequality, AbSetup};
pub use bilinear::{check_bilinear_ratio, BilinearSetup};
pub use coercivity::{check_coercivity, check_max_point_bound, check_sign_integral, BlockSetup};
pub use commutator::{check_commutator_vanishing, CommutatorSetup};
pub use counterexample::{counterexample_gamma2_q1, Envelope, LineGrid};
pub use gagliardo::{check_gagliardo_equivalence, GagliardoOptions, GagliardoSetup, HermiteSample};
pub use heat::{check_heat_decay, check_lq_semigroup_decay, heat_decay_sweep, DecaySetup};
pub use mass::check_spectral_mass_contraction;
pub use phase::{check_phase_bounds, PhaseSetup};
pub use report::{InequalityReport, LemmaId, SweepRow, TheoreticalBound, Verdict, Witness};
pub use sampler::{BlockSampler, BumpBand, BumpSampler};
pub use trilinear::{check_trilinear_bounds, TrilinearRegime, TrilinearSetup};
