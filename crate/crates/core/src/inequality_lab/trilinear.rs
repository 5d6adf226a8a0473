//! Scale sweeps of the trilinear form N(g, f, f) against its Sobolev bounds.

use serde::{Deserialize, Serialize};

use super::report::{InequalityReport, LemmaId, SweepRow, TheoreticalBound, Verdict, Witness};
use super::sampler::{argmax, par_samples, BumpBand, BumpSampler};
use crate::error::{Result, SqgError};
use crate::littlewood_paley::partition::OUTER_RADIUS;
use crate::littlewood_paley::{trilinear_n, SemigroupWeight};
use crate::spectral::{sobolev_norm, GridSpec, SpectralField};

/// Largest allowed max/min ratio of the per-scale constants.
pub const TRILINEAR_STABILITY: f64 = 20.0;

/// Frequency arrangement of the sampled pair (g, f).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrilinearRegime {
    /// g and f both low-passed at scale j.
    Mixed,
    /// g at scale j-2, f in block j.
    LowHigh,
    /// g in block j, f the sum of a scale j-2 part and a block j part. With f
    /// purely low the form vanishes by frequency support.
    HighLow,
    /// g and f in block j.
    Diagonal,
    /// N(g, g, f) with g below N₀ = 7/6·2^j and f below 2N₀, against
    /// N₀^{2s+2}‖g‖₂²‖f‖₂.
    Localized,
}

impl TrilinearRegime {
    pub const ALL: [TrilinearRegime; 5] = [
        TrilinearRegime::Mixed,
        TrilinearRegime::LowHigh,
        TrilinearRegime::HighLow,
        TrilinearRegime::Diagonal,
        TrilinearRegime::Localized,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TrilinearRegime::Mixed => "mixed",
            TrilinearRegime::LowHigh => "low_high",
            TrilinearRegime::HighLow => "high_low",
            TrilinearRegime::Diagonal => "diagonal",
            TrilinearRegime::Localized => "localized",
        }
    }

    /// Band and width of g, then of the parts summed into f.
    fn bands(self, j: i32) -> ((BumpBand, f64), Vec<(BumpBand, f64)>) {
        let w = (-j as f64).exp2();
        match self {
            TrilinearRegime::Mixed => ((BumpBand::Low(j), w), vec![(BumpBand::Low(j), w)]),
            TrilinearRegime::LowHigh => ((BumpBand::Low(j - 2), 4.0 * w), vec![(BumpBand::Block(j), w)]),
            TrilinearRegime::HighLow => (
                (BumpBand::Block(j), w),
                vec![(BumpBand::Low(j - 2), 4.0 * w), (BumpBand::Block(j), w)],
            ),
            TrilinearRegime::Diagonal => ((BumpBand::Block(j), w), vec![(BumpBand::Block(j), w)]),
            TrilinearRegime::Localized => ((BumpBand::Low(j), w), vec![(BumpBand::Low(j + 1), 0.5 * w)]),
        }
    }

    /// Sample `i` of the pair (g, f) at scale j.
    fn pair(self, sampler: &BumpSampler, grid: GridSpec, j: i32, i: u64) -> Result<(SpectralField, SpectralField)> {
        let ((gb, gw), parts) = self.bands(j);
        let g = sampler.sample(grid, gw, gb, 3 * i)?;
        let mut f = SpectralField::zeros(grid);
        for (k, &(b, w)) in parts.iter().enumerate() {
            f = f.add(&sampler.sample(grid, w, b, 3 * i + 1 + k as u64)?)?;
        }
        Ok((g, f))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrilinearSetup {
    pub gamma: f64,
    pub regime: TrilinearRegime,
    pub js: Vec<i32>,
    /// Times are t = τ·2^{-jγ}.
    pub taus: Vec<f64>,
    pub n_samples: u64,
    pub seed: u64,
}

impl TrilinearSetup {
    /// j = 2..5, τ ∈ {0, 1/2}, 8 pairs per scale.
    pub fn new(gamma: f64, regime: TrilinearRegime, seed: u64) -> Self {
        Self {
            gamma,
            regime,
            js: (2..=5).collect(),
            taus: vec![0.0, 0.5],
            n_samples: 8,
            seed,
        }
    }

    fn grid(j: i32) -> Result<GridSpec> {
        GridSpec::square(1usize << (j + 3).max(5))
    }
}

/// |N| divided by the regime's bound at one sample.
fn ratio(setup: &TrilinearSetup, j: i32, t: f64, g: &SpectralField, f: &SpectralField) -> Result<f64> {
    let s = 2.0 - setup.gamma;
    let w = SemigroupWeight::Full;
    let (num, den) = if setup.regime == TrilinearRegime::Localized {
        let n0 = OUTER_RADIUS * (j as f64).exp2();
        let g2 = g.l2_norm();
        (
            trilinear_n(g, g, f, t, setup.gamma, s, w)?,
            n0.powf(2.0 * s + 2.0) * g2 * g2 * f.l2_norm(),
        )
    } else {
        let fs = sobolev_norm(f, s + 0.5 * setup.gamma, true)?;
        (
            trilinear_n(g, f, f, t, setup.gamma, s, w)?,
            sobolev_norm(g, s, true)? * fs * fs,
        )
    };
    if den == 0.0 {
        return Err(SqgError::DegenerateSample("trilinear bound vanishes".into()));
    }
    Ok(num.abs() / den)
}

/// Measures the ratio of |N| to its bound over bump samples at each scale j
/// and time τ·2^{-jγ}. The constant at scale j is the largest ratio there;
/// passes iff the largest and smallest of these differ by at most
/// [`TRILINEAR_STABILITY`].
pub fn check_trilinear_bounds(setup: &TrilinearSetup) -> Result<InequalityReport> {
    let gamma = setup.gamma;
    if !(gamma > 0.0 && gamma < 2.0) {
        return Err(SqgError::param(format!(
            "trilinear bounds need 0 < gamma < 2, got {gamma}"
        )));
    }
    if setup.js.is_empty() || setup.taus.is_empty() || setup.n_samples == 0 {
        return Err(SqgError::param("trilinear sweep needs scales, times and samples"));
    }
    if setup.taus.iter().any(|&t| !(t >= 0.0)) {
        return Err(SqgError::param("trilinear sweep times must be nonnegative"));
    }
    let sampler = BumpSampler::new(setup.seed);
    let mut r = InequalityReport::new(LemmaId::TrilinearBound, setup.seed)
        .param("gamma", gamma)
        .param("s", 2.0 - gamma)
        .threshold("scale_stability", TRILINEAR_STABILITY);
    r.notes.push(format!("regime {}", setup.regime.as_str()));

    let mut per_scale = Vec::with_capacity(setup.js.len());
    let mut best: Option<(f64, i32, u64)> = None;
    for &j in &setup.js {
        let grid = TrilinearSetup::grid(j)?;
        let per_sample = par_samples(setup.n_samples, |i| {
            let (g, f) = setup.regime.pair(&sampler, grid, j, i)?;
            setup
                .taus
                .iter()
                .map(|&tau| ratio(setup, j, tau * (-(j as f64) * gamma).exp2(), &g, &f))
                .collect::<Result<Vec<f64>>>()
        })?;
        let mut scale_max = 0.0f64;
        for (k, &tau) in setup.taus.iter().enumerate() {
            let col: Vec<f64> = per_sample.iter().map(|v| v[k]).collect();
            let (i, v) = argmax(&col).expect("nonempty");
            r.sweep.push(SweepRow {
                j: Some(j),
                p: Some(2.0),
                q: None,
                gamma: Some(gamma),
                t: Some(tau * (-(j as f64) * gamma).exp2()),
                measured_ratio: v,
            });
            scale_max = scale_max.max(v);
            if best.map_or(true, |(b, _, _)| v > b) {
                best = Some((v, j, i as u64));
            }
        }
        r.measure(format!("constant_j{j}"), scale_max);
        per_scale.push(scale_max);
    }
    let hi = per_scale.iter().copied().fold(0.0, f64::max);
    let lo = per_scale.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = hi / lo;
    r.n_samples = setup.n_samples * (setup.js.len() * setup.taus.len()) as u64;
    r.measured_constant = hi;
    r.theoretical_bound = TheoreticalBound::UNKNOWN;
    r.measure("scale_spread", spread);
    r.verdict = Verdict::from_bool(hi.is_finite() && lo > 0.0 && spread <= TRILINEAR_STABILITY);
    if let Some((v, j, i)) = best {
        let grid = TrilinearSetup::grid(j)?;
        let (g, _) = setup.regime.pair(&sampler, grid, j, i)?;
        r.witness = Some(Witness::field(i, v, &g)?);
    }
    Ok(r)
}
