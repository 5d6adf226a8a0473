//! Dyadic frequency calculus: projections, Besov norms, paraproducts,
//! bilinear symbol operators and the block commutator.

pub mod besov;
pub mod bilinear;
pub mod commutator;
pub mod paraproduct;
pub mod partition;
pub mod trilinear;

pub use besov::{besov_norm, besov_norm_homogeneous, block_lp_norms};
pub use bilinear::{
    apply_bilinear_symbol, apply_bilinear_symbol_with, BilinearOptions, BilinearSymbol, RadialBand, SymbolSupport,
};
pub use commutator::{commutator_bj, commutator_symbol};
pub use paraproduct::{dealiased_product, paraproduct_decompose, Paraproduct};
pub use partition::{concrete_phi0, phi, phi0, project_block, project_high, project_low, DyadicPartition};
pub use trilinear::{trilinear_n, SemigroupWeight};
