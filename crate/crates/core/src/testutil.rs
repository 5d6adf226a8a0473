use crate::initial::PowerLaw;
use crate::spectral::{GridSpec, SpectralField};

/// Mean-free random field over the whole dealias disk.
pub fn random_field(grid: GridSpec, seed: u64, slope: f64) -> SpectralField {
    PowerLaw::new(slope, grid.unit(), f64::INFINITY).sample(grid, seed)
}
