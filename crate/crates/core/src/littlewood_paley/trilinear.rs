use serde::{Deserialize, Serialize};

use super::commutator::dot_product;
use crate::error::{Result, SqgError};
use crate::spectral::multiplier::{frac_symbol, gevrey_exponent};
use crate::spectral::{apply_multiplier, gradient, riesz_perp, MultiplierSpec, SpectralField, DEFAULT_GEVREY_CAP};

/// Weight a in A = a·D^γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemigroupWeight {
    /// A = ½D^γ
    Half,
    /// A = D^γ
    Full,
}

impl SemigroupWeight {
    pub fn factor(self) -> f64 {
        match self {
            SemigroupWeight::Half => 0.5,
            SemigroupWeight::Full => 1.0,
        }
    }
}

/// N(g₁,g₂,g₃) = ∫ D^s(R^⊥e^{-tA}g₁ · ∇e^{-tA}g₂) D^s e^{tA}g₃ dx.
pub fn trilinear_n(
    g1: &SpectralField,
    g2: &SpectralField,
    g3: &SpectralField,
    t: f64,
    gamma: f64,
    s: f64,
    weight: SemigroupWeight,
) -> Result<f64> {
    g1.check_grid(g2)?;
    g1.check_grid(g3)?;
    if t < 0.0 {
        return Err(SqgError::param(format!("trilinear form needs t >= 0, got {t}")));
    }
    let a = weight.factor();
    let e = gevrey_exponent(g3, a, t, gamma);
    if e > DEFAULT_GEVREY_CAP {
        return Err(SqgError::OverflowGuard {
            guard: "trilinear_weight",
            exponent: e,
            cap: DEFAULT_GEVREY_CAP,
        });
    }
    let heat = MultiplierSpec::heat(a, t, gamma);
    let (r1, r2) = riesz_perp(g1);
    let u = (apply_multiplier(&r1, &heat)?, apply_multiplier(&r2, &heat)?);
    let w = dot_product(&u, &gradient(&apply_multiplier(g2, &heat)?))?;
    let grid = g1.grid();
    let k = grid.wavenumbers();
    let mut acc = 0.0;
    for ((i1, i2), c3) in g3.coeffs().indexed_iter() {
        if c3.norm_sqr() == 0.0 {
            continue;
        }
        let r = k[i1].hypot(k[i2]);
        let wt = frac_symbol(r, 2.0 * s) * (a * t * r.powf(gamma)).exp();
        acc += wt * (w.coeffs()[[i1, i2]] * c3.conj()).re;
    }
    Ok(acc * grid.period() * grid.period())
}
