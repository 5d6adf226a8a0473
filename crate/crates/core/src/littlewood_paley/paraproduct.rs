use ndarray::Array2;

use super::besov::to_physical;
use super::partition::{decompose, DyadicPartition};
use crate::error::Result;
use crate::spectral::{forward_pair, forward_transform, inverse_transform, SpectralField};

/// Bony decomposition of a product.
#[derive(Debug, Clone)]
pub struct Paraproduct {
    /// Σ_i f_i g_{≤i-2}
    pub high_low: SpectralField,
    /// Σ_i g_i f_{≤i-2}
    pub low_high: SpectralField,
    /// Σ_{|i-i'|≤1} f_i g_{i'}
    pub diagonal: SpectralField,
}

impl Paraproduct {
    pub fn total(&self) -> Result<SpectralField> {
        self.high_low.add(&self.low_high)?.add(&self.diagonal)
    }
}

/// Splits the dealiased product fg by relative block index of the factors.
pub fn paraproduct_decompose(f: &SpectralField, g: &SpectralField) -> Result<Paraproduct> {
    f.check_grid(g)?;
    let grid = *f.grid();
    let part = DyadicPartition::for_grid(&grid);
    let fb: Vec<SpectralField> = decompose(f, &part).into_iter().map(|(_, x)| x).collect();
    let gb: Vec<SpectralField> = decompose(g, &part).into_iter().map(|(_, x)| x).collect();
    let fp = to_physical(&fb)?;
    let gp = to_physical(&gb)?;
    let m = fp.len();
    let n = grid.n();
    let zero = Array2::<f64>::zeros((n, n));

    let mut high_low = zero.clone();
    let mut low_high = zero.clone();
    let mut diagonal = zero.clone();
    let mut f_cum = zero.clone();
    let mut g_cum = zero;
    for i in 0..m {
        if i >= 2 {
            f_cum += &fp[i - 2];
            g_cum += &gp[i - 2];
            high_low += &(&fp[i] * &g_cum);
            low_high += &(&gp[i] * &f_cum);
        }
        for g in &gp[i.saturating_sub(1)..(i + 2).min(m)] {
            diagonal += &(&fp[i] * g);
        }
    }
    let (mut hl, mut lh) = forward_pair(&high_low, &low_high, &grid)?;
    let mut dg = forward_transform(&diagonal, &grid)?;
    hl.dealias_in_place();
    lh.dealias_in_place();
    dg.dealias_in_place();
    Ok(Paraproduct {
        high_low: hl,
        low_high: lh,
        diagonal: dg,
    })
}

/// Pseudospectral product with the radial dealiasing rule applied to the result.
pub fn dealiased_product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    f.check_grid(g)?;
    let a = inverse_transform(f)?;
    let b = inverse_transform(g)?;
    let mut out = forward_transform(&(&a * &b), f.grid())?;
    out.dealias_in_place();
    Ok(out)
}
