//! Seeded random fields for the inequality sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Result, SqgError};
use crate::initial::random_hermitian;
use crate::littlewood_paley::{phi, project_block, project_low};
use crate::spectral::{forward_transform, sample, GridSpec, SpectralField};

/// RNG for sample `index` of a sweep. Each sample has its own stream so
/// results do not depend on evaluation order.
pub(crate) fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Evaluates `f` on sample indices `0..n` in parallel, keeping index order.
pub(crate) fn par_samples<T: Send>(n: u64, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..n).into_par_iter().map(f).collect()
}

/// Index and value of the smallest entry; ties keep the first.
pub(crate) fn argmin(values: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.map_or(true, |(_, b)| v < b) {
            best = Some((i, v));
        }
    }
    best
}

pub(crate) fn argmax(values: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.map_or(true, |(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best
}

/// Random real fields with complex Gaussian coefficients shaped by φ(2^{-j}|k|),
/// so every sample lives in dyadic block j.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSampler {
    pub seed: u64,
}

impl BlockSampler {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn sample(&self, grid: GridSpec, j: i32, index: u64) -> Result<SpectralField> {
        let mut rng = sample_rng(self.seed, index);
        let s = (-j as f64).exp2();
        let f = random_hermitian(grid, &mut rng, |r| phi(r * s));
        if f.nonzero_count() == 0 {
            return Err(SqgError::DegenerateSample(format!(
                "block {j} has no lattice modes on a {}-point grid",
                grid.n()
            )));
        }
        Ok(f)
    }
}

/// Band of a bump sample after projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BumpBand {
    /// P_{≤j}
    Low(i32),
    /// P_j
    Block(i32),
}

/// Sums of three bumps (1 - r²/2w²)e^{-r²/2w²} with w ∼ `width`, centred near
/// the middle of the box and projected onto a dyadic band. Each bump has zero
/// integral, so removing the mean does not break scaling.
///
/// Centres, widths and amplitudes are drawn relative to `width`, so the same
/// seed and index at widths w and w/2 give the same function rescaled. That
/// makes constants of scale invariant inequalities comparable across j.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BumpSampler {
    pub seed: u64,
}

impl BumpSampler {
    pub const BUMPS: usize = 3;

    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn sample(&self, grid: GridSpec, width: f64, band: BumpBand, index: u64) -> Result<SpectralField> {
        if width <= 0.0 {
            return Err(SqgError::param(format!("bump width must be positive, got {width}")));
        }
        let mut rng = sample_rng(self.seed, index);
        let mut bumps = [(0.0, 0.0, 0.0, 0.0); Self::BUMPS];
        for b in bumps.iter_mut() {
            let dx: f64 = rng.random_range(-2.0..2.0);
            let dy: f64 = rng.random_range(-2.0..2.0);
            let w: f64 = rng.random_range(0.7..1.4);
            let a: f64 = rng.sample(StandardNormal);
            *b = (dx * width, dy * width, w * width, a);
        }
        let l = grid.period();
        let c = 0.5 * l;
        let wrap = |d: f64| d - l * (d / l).round();
        let values = sample(&grid, |x, y| {
            bumps
                .iter()
                .map(|&(bx, by, w, a)| {
                    let dx = wrap(x - c - bx);
                    let dy = wrap(y - c - by);
                    let u = (dx * dx + dy * dy) / (2.0 * w * w);
                    a * (1.0 - u) * (-u).exp()
                })
                .sum()
        });
        let mut f = forward_transform(&values, &grid)?;
        f.coeffs_mut()[[0, 0]] = Default::default();
        let f = match band {
            BumpBand::Low(j) => project_low(&f, j),
            BumpBand::Block(j) => project_block(&f, j),
        };
        if f.nonzero_count() == 0 {
            return Err(SqgError::DegenerateSample("bump sample projected to zero".into()));
        }
        Ok(f)
    }
}
