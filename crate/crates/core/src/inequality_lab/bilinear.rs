//! Hölder-type bound for the localized phase-weight operator:
//! ‖T_σ(f, g)‖_r ≲ ‖f‖_{p₁}‖g‖_{p₂} with 1/r = 1/p₁ + 1/p₂, f low and g in block j.

use super::report::{InequalityReport, LemmaId, SweepRow, TheoreticalBound, Verdict};
use super::sampler::{par_samples, BumpBand, BumpSampler};
use crate::error::{Result, SqgError};
use crate::littlewood_paley::{apply_bilinear_symbol, BilinearSymbol};
use crate::spectral::{inverse_transform, lp_norm, GridSpec};

/// Largest allowed max/min ratio of the per-scale constants.
pub const BILINEAR_STABILITY: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct BilinearSetup {
    pub gamma: f64,
    pub p1: f64,
    pub p2: f64,
    pub js: Vec<i32>,
    /// Times are t = τ·2^{-jγ}.
    pub taus: Vec<f64>,
    pub n_samples: u64,
    pub seed: u64,
}

impl BilinearSetup {
    /// p₁ = 2, p₂ = 4 (so r = 4/3), j ∈ {3, 4, 5}, τ ∈ {0, 1/2, 1}, 6 pairs.
    pub fn new(gamma: f64, seed: u64) -> Self {
        Self {
            gamma,
            p1: 2.0,
            p2: 4.0,
            js: vec![3, 4, 5],
            taus: vec![0.0, 0.5, 1.0],
            n_samples: 6,
            seed,
        }
    }

    pub fn r(&self) -> f64 {
        1.0 / (1.0 / self.p1 + 1.0 / self.p2)
    }
}

/// For each j, applies the phase weight localized to |ξ| ≪ 2^j, |η| ∼ 2^j to
/// f = P_{≤j-3} and g = P_j bump samples. Passes iff the per-scale maxima of
/// ‖T_σ(f,g)‖_r/(‖f‖_{p₁}‖g‖_{p₂}) are positive, finite and agree within
/// [`BILINEAR_STABILITY`].
pub fn check_bilinear_ratio(setup: &BilinearSetup) -> Result<InequalityReport> {
    let gamma = setup.gamma;
    if !(gamma > 0.0 && gamma <= 2.0) {
        return Err(SqgError::param(format!(
            "bilinear ratio needs 0 < gamma <= 2, got {gamma}"
        )));
    }
    if !(setup.p1 >= 1.0 && setup.p2 >= 1.0 && setup.r() >= 1.0) {
        return Err(SqgError::param("bilinear ratio needs exponents with r >= 1"));
    }
    if setup.js.is_empty() || setup.taus.is_empty() || setup.n_samples == 0 {
        return Err(SqgError::param("bilinear sweep needs scales, times and samples"));
    }
    let r_exp = setup.r();
    let sampler = BumpSampler::new(setup.seed);
    let mut r = InequalityReport::new(LemmaId::BilinearRatio, setup.seed)
        .param("gamma", gamma)
        .param("p1", setup.p1)
        .param("p2", setup.p2)
        .param("r", r_exp)
        .threshold("scale_stability", BILINEAR_STABILITY);
    let mut per_scale = Vec::new();
    for &j in &setup.js {
        let grid = GridSpec::square(1usize << (j + 3))?;
        let w = (-j as f64).exp2();
        let ratios = par_samples(setup.n_samples, |i| {
            let f = sampler.sample(grid, 8.0 * w, BumpBand::Low(j - 3), 2 * i)?;
            let g = sampler.sample(grid, w, BumpBand::Block(j), 2 * i + 1)?;
            let den =
                lp_norm(&inverse_transform(&f)?, &grid, setup.p1)? * lp_norm(&inverse_transform(&g)?, &grid, setup.p2)?;
            setup
                .taus
                .iter()
                .map(|&tau| {
                    let t = tau * (-(j as f64) * gamma).exp2();
                    let out = apply_bilinear_symbol(&BilinearSymbol::sigma1(j, t, gamma), &f, &g)?;
                    Ok(lp_norm(&inverse_transform(&out)?, &grid, r_exp)? / den)
                })
                .collect::<Result<Vec<f64>>>()
        })?;
        let mut scale_max = 0.0f64;
        for (k, &tau) in setup.taus.iter().enumerate() {
            let v = ratios.iter().map(|x| x[k]).fold(0.0, f64::max);
            r.sweep.push(SweepRow {
                j: Some(j),
                p: Some(r_exp),
                q: None,
                gamma: Some(gamma),
                t: Some(tau * (-(j as f64) * gamma).exp2()),
                measured_ratio: v,
            });
            scale_max = scale_max.max(v);
        }
        r.measure(format!("constant_j{j}"), scale_max);
        per_scale.push(scale_max);
    }
    let hi = per_scale.iter().copied().fold(0.0, f64::max);
    let lo = per_scale.iter().copied().fold(f64::INFINITY, f64::min);
    r.n_samples = setup.n_samples * (setup.js.len() * setup.taus.len()) as u64;
    r.measured_constant = hi;
    r.theoretical_bound = TheoreticalBound::UNKNOWN;
    r.measure("scale_spread", hi / lo);
    r.verdict = Verdict::from_bool(hi.is_finite() && lo > 0.0 && hi / lo <= BILINEAR_STABILITY);
    Ok(r)
}
