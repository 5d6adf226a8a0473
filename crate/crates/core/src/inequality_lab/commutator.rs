//! Exact vanishing of B_j on low-frequency pairs far above their support.

use super::report::{InequalityReport, LemmaId, TheoreticalBound, Verdict};
use super::sampler::par_samples;
use crate::error::{Result, SqgError};
use crate::initial::PowerLaw;
use crate::littlewood_paley::commutator::dot_product;
use crate::littlewood_paley::{commutator_bj, project_low};
use crate::spectral::{gradient, riesz_perp, GridSpec, SpectralField};

/// Relative size below which B_j counts as zero.
pub const VANISHING_TOL: f64 = 1e-11;
/// The control block right above the supports must stay at least this large.
pub const CONTROL_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorSetup {
    pub j0: i32,
    /// Blocks where B_j must vanish; each must exceed j0 + 6.
    pub js: Vec<i32>,
    pub n_pairs: u64,
    pub gamma: f64,
    /// Times are t = τ·2^{-j0·γ}.
    pub tau: f64,
    pub grid: GridSpec,
    pub seed: u64,
}

impl CommutatorSetup {
    /// J₀ = 4, j ∈ {J₀+7, J₀+8}, 50 pairs on a 256² grid of period 2π/32, so
    /// blocks up to J₀+8 are resolved by the lattice.
    pub fn new(seed: u64) -> Result<Self> {
        Ok(Self {
            j0: 4,
            js: vec![11, 12],
            n_pairs: 50,
            gamma: 0.5,
            tau: 0.5,
            grid: GridSpec::with_period(256, std::f64::consts::TAU / 32.0)?,
            seed,
        })
    }

    fn pair(&self, i: u64) -> (SpectralField, SpectralField) {
        let raw = |s| PowerLaw::new(0.0, 0.0, f64::INFINITY).sample(self.grid, s);
        let base = self.seed.wrapping_mul(0x9E37_79B9).wrapping_add(2 * i);
        (
            project_low(&raw(base), self.j0 + 2),
            project_low(&raw(base + 1), self.j0 + 4),
        )
    }
}

/// ‖R^⊥e^{-tD^γ}f·∇e^{-tD^γ}g‖₂ without the heat factor, the natural size of
/// either half of B_j.
fn product_scale(f: &SpectralField, g: &SpectralField) -> Result<f64> {
    Ok(dot_product(&riesz_perp(f), &gradient(g))?.l2_norm())
}

/// Draws pairs f = P_{≤J₀+2}F, g = P_{≤J₀+4}G of white-noise fields and
/// evaluates B_j(f, g) for each requested j > J₀+6. Passes iff every
/// ‖B_j‖₂ is below [`VANISHING_TOL`] times the product scale, while the
/// block J₀+3, which the supports do reach, stays above [`CONTROL_FLOOR`].
pub fn check_commutator_vanishing(setup: &CommutatorSetup) -> Result<InequalityReport> {
    if setup.js.iter().any(|&j| j <= setup.j0 + 6) {
        return Err(SqgError::param("vanishing only holds for j > J0 + 6"));
    }
    if setup.n_pairs == 0 || setup.js.is_empty() || !(setup.tau >= 0.0) {
        return Err(SqgError::param("commutator sweep needs pairs, blocks and tau >= 0"));
    }
    let t = setup.tau * (-(setup.j0 as f64) * setup.gamma).exp2();
    let rows = par_samples(setup.n_pairs, |i| {
        let (f, g) = setup.pair(i);
        let scale = product_scale(&f, &g)?;
        if scale == 0.0 {
            return Err(SqgError::DegenerateSample("commutator pair has zero product".into()));
        }
        let worst = setup
            .js
            .iter()
            .map(|&j| Ok(commutator_bj(&f, &g, j, t, setup.gamma)?.l2_norm() / scale))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let control = commutator_bj(&f, &g, setup.j0 + 3, t, setup.gamma)?.l2_norm() / scale;
        Ok((worst, control))
    })?;
    let worst = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let control = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);

    let mut r = InequalityReport::new(LemmaId::CommutatorVanishing, setup.seed)
        .param("j0", setup.j0 as f64)
        .param("gamma", setup.gamma)
        .param("t", t)
        .threshold("relative_tolerance", VANISHING_TOL)
        .threshold("control_floor", CONTROL_FLOOR);
    for &j in &setup.js {
        r.parameters.insert(format!("j{}", j - setup.j0), j as f64);
    }
    r.n_samples = setup.n_pairs;
    r.measured_constant = worst;
    r.theoretical_bound = TheoreticalBound::Value(0.0);
    r.measure("control_min", control);
    r.verdict = Verdict::from_bool(worst < VANISHING_TOL && control > CONTROL_FLOOR);
    Ok(r)
}
