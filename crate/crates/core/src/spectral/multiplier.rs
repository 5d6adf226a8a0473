use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::SpectralField;
use crate::error::{Result, SqgError};
use crate::littlewood_paley::partition::{phi, phi0};

/// Default cap on the exponent of any Gevrey weight, e^{500} ≈ 1.4e217.
pub const DEFAULT_GEVREY_CAP: f64 = 500.0;

/// Scalar Fourier multipliers. Frequencies are physical wavenumbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultiplierSpec {
    /// |k|^s; the k = 0 mode is sent to 0 unless s = 0.
    FractionalLaplacian { s: f64 },
    /// e^{-ν t |k|^γ}
    Heat { nu: f64, t: f64, gamma: f64 },
    /// e^{λ t |k|^γ}, guarded by `cap` on the exponent.
    Gevrey { lambda: f64, t: f64, gamma: f64, cap: f64 },
    /// R_j with symbol i k_j / |k|, `axis` 0 or 1.
    RieszComponent { axis: usize },
    /// φ₀(2^{-j} k)
    LowPass { j: i32 },
    /// φ(2^{-j} k)
    Block { j: i32 },
}

impl MultiplierSpec {
    pub fn gevrey(lambda: f64, t: f64, gamma: f64) -> Self {
        MultiplierSpec::Gevrey {
            lambda,
            t,
            gamma,
            cap: DEFAULT_GEVREY_CAP,
        }
    }

    pub fn heat(nu: f64, t: f64, gamma: f64) -> Self {
        MultiplierSpec::Heat { nu, t, gamma }
    }

    pub fn frac(s: f64) -> Self {
        MultiplierSpec::FractionalLaplacian { s }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            MultiplierSpec::FractionalLaplacian { s } if !s.is_finite() => {
                Err(SqgError::param("fractional order must be finite"))
            }
            MultiplierSpec::Heat { nu, t, gamma } => {
                if t < 0.0 {
                    return Err(SqgError::param(format!("heat multiplier needs t >= 0, got {t}")));
                }
                if !(nu >= 0.0 && nu.is_finite() && gamma.is_finite()) {
                    return Err(SqgError::param("heat multiplier needs finite nu >= 0 and finite gamma"));
                }
                Ok(())
            }
            MultiplierSpec::Gevrey { lambda, t, gamma, cap } => {
                if !(lambda.is_finite() && t.is_finite() && gamma.is_finite() && cap > 0.0) {
                    return Err(SqgError::param(
                        "gevrey multiplier needs finite parameters and a positive cap",
                    ));
                }
                Ok(())
            }
            MultiplierSpec::RieszComponent { axis } if axis > 1 => {
                Err(SqgError::param(format!("Riesz axis must be 0 or 1, got {axis}")))
            }
            _ => Ok(()),
        }
    }

    /// True when the symbol is odd in k and must vanish on Nyquist lines.
    pub fn is_odd(&self) -> bool {
        matches!(self, MultiplierSpec::RieszComponent { .. })
    }

    /// Symbol value at physical wavenumber (k1, k2).
    pub fn symbol(&self, k1: f64, k2: f64) -> Complex64 {
        let r = k1.hypot(k2);
        match *self {
            MultiplierSpec::FractionalLaplacian { s } => Complex64::new(frac_symbol(r, s), 0.0),
            MultiplierSpec::Heat { nu, t, gamma } => Complex64::new((-nu * t * r.powf(gamma)).exp(), 0.0),
            MultiplierSpec::Gevrey { lambda, t, gamma, .. } => Complex64::new((lambda * t * r.powf(gamma)).exp(), 0.0),
            MultiplierSpec::RieszComponent { axis } => {
                if r == 0.0 {
                    Complex64::default()
                } else {
                    let kj = if axis == 0 { k1 } else { k2 };
                    Complex64::new(0.0, kj / r)
                }
            }
            MultiplierSpec::LowPass { j } => Complex64::new(phi0(r * (-j as f64).exp2()), 0.0),
            MultiplierSpec::Block { j } => Complex64::new(phi(r * (-j as f64).exp2()), 0.0),
        }
    }
}

/// |k|^s with 0^s := 0 for s ≠ 0 and 0^0 := 1.
#[inline]
pub fn frac_symbol(r: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else if r == 0.0 {
        0.0
    } else {
        r.powf(s)
    }
}

/// Largest Gevrey exponent λ t |k|^γ over the nonzero coefficients of `field`.
pub fn gevrey_exponent(field: &SpectralField, lambda: f64, t: f64, gamma: f64) -> f64 {
    let r = field.support_radius(0.0);
    if r == 0.0 {
        return 0.0;
    }
    lambda * t * r.powf(gamma)
}

pub fn apply_multiplier(field: &SpectralField, m: &MultiplierSpec) -> Result<SpectralField> {
    m.validate()?;
    if let MultiplierSpec::Gevrey { lambda, t, gamma, cap } = *m {
        let e = gevrey_exponent(field, lambda, t, gamma);
        if e > cap {
            return Err(SqgError::OverflowGuard {
                guard: "gevrey_weight",
                exponent: e,
                cap,
            });
        }
    }
    Ok(apply_symbol(field, |k1, k2| m.symbol(k1, k2), m.is_odd()))
}

/// Applies an arbitrary symbol; `odd` zeroes the Nyquist lines.
pub fn apply_symbol(field: &SpectralField, symbol: impl Fn(f64, f64) -> Complex64, odd: bool) -> SpectralField {
    let grid = *field.grid();
    let k = grid.wavenumbers();
    let mut out = field.clone();
    for ((i1, i2), c) in out.coeffs_mut().indexed_iter_mut() {
        if *c == Complex64::default() {
            continue;
        }
        if odd && (grid.is_nyquist(i1) || grid.is_nyquist(i2)) {
            *c = Complex64::default();
        } else {
            *c *= symbol(k[i1], k[i2]);
        }
    }
    out
}

/// u = R^⊥θ = (-R₂θ, R₁θ), symbol i k^⊥/|k| with k^⊥ = (-k₂, k₁).
pub fn riesz_perp(field: &SpectralField) -> (SpectralField, SpectralField) {
    let u1 = apply_symbol(
        field,
        |k1, k2| {
            let r = k1.hypot(k2);
            if r == 0.0 {
                Complex64::default()
            } else {
                Complex64::new(0.0, -k2 / r)
            }
        },
        true,
    );
    let u2 = apply_symbol(
        field,
        |k1, k2| {
            let r = k1.hypot(k2);
            if r == 0.0 {
                Complex64::default()
            } else {
                Complex64::new(0.0, k1 / r)
            }
        },
        true,
    );
    (u1, u2)
}

/// (∂₁f, ∂₂f)
pub fn gradient(field: &SpectralField) -> (SpectralField, SpectralField) {
    (
        apply_symbol(field, |k1, _| Complex64::new(0.0, k1), true),
        apply_symbol(field, |_, k2| Complex64::new(0.0, k2), true),
    )
}

/// ∂₁a + ∂₂b
pub fn divergence(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    let (da, _) = gradient(a);
    let (_, db) = gradient(b);
    da.add(&db)
}

/// Largest spectral divergence |k·û(k)| over all modes.
pub fn spectral_divergence_defect(u1: &SpectralField, u2: &SpectralField) -> f64 {
    let k = u1.grid().wavenumbers();
    let mut worst: f64 = 0.0;
    for ((i1, i2), a) in u1.coeffs().indexed_iter() {
        let b = u2.coeffs()[[i1, i2]];
        worst = worst.max((a * k[i1] + b * k[i2]).norm());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::field::{forward_transform, inverse_transform, sample};
    use crate::spectral::grid::GridSpec;
    use crate::spectral::norms::sobolev_norm;
    use crate::testutil::random_field;

    #[test]
    fn fractional_laplacian_on_pure_mode() {
        let g = GridSpec::square(32).unwrap();
        let f = SpectralField::cosine_mode(g, 3, 4, 1.0);
        let d = apply_multiplier(&f, &MultiplierSpec::frac(0.7)).unwrap();
        let expect = 5f64.powf(0.7);
        assert!((d.mode(3, 4).re - 0.5 * expect).abs() < 1e-14);
        assert!((d.mode(-3, -4).re - 0.5 * expect).abs() < 1e-14);
    }

    #[test]
    fn fractional_laplacian_kills_mean() {
        let g = GridSpec::square(16).unwrap();
        let mut f = SpectralField::cosine_mode(g, 0, 0, 2.0);
        f.add_real_mode(1, 0, Complex64::new(1.0, 0.0));
        let d = apply_multiplier(&f, &MultiplierSpec::frac(0.5)).unwrap();
        assert_eq!(d.mean(), 0.0);
        let id = apply_multiplier(&f, &MultiplierSpec::frac(0.0)).unwrap();
        assert_eq!(id, f);
    }

    #[test]
    fn heat_then_gevrey_is_identity() {
        let g = GridSpec::square(64).unwrap();
        let f = random_field(g, 11, 1.5).dealiased();
        let kmax = g.dealias_radius();
        for gamma in [0.3, 0.5, 0.9] {
            let t = 30.0 / kmax.powf(gamma);
            let h = apply_multiplier(&f, &MultiplierSpec::heat(1.0, t, gamma)).unwrap();
            let back = apply_multiplier(&h, &MultiplierSpec::gevrey(1.0, t, gamma)).unwrap();
            assert!(back.sub(&f).unwrap().l2_norm() <= 1e-10 * f.l2_norm());
        }
    }

    #[test]
    fn gevrey_guard_trips() {
        let g = GridSpec::square(64).unwrap();
        let f = SpectralField::cosine_mode(g, 20, 0, 1.0);
        let err = apply_multiplier(&f, &MultiplierSpec::gevrey(1.0, 200.0, 1.0)).unwrap_err();
        assert!(matches!(err, SqgError::OverflowGuard { .. }));
        let low = SpectralField::cosine_mode(g, 1, 0, 1.0);
        assert!(apply_multiplier(&low, &MultiplierSpec::gevrey(1.0, 200.0, 1.0)).is_ok());
    }

    #[test]
    fn heat_rejects_negative_time() {
        let g = GridSpec::square(16).unwrap();
        let f = SpectralField::cosine_mode(g, 1, 0, 1.0);
        assert!(apply_multiplier(&f, &MultiplierSpec::heat(1.0, -0.1, 1.0)).is_err());
    }

    #[test]
    fn fractional_composition() {
        let g = GridSpec::square(32).unwrap();
        let f = random_field(g, 3, 1.0);
        let mut f0 = f.clone();
        f0.coeffs_mut()[[0, 0]] = Complex64::default();
        let a = apply_multiplier(
            &apply_multiplier(&f0, &MultiplierSpec::frac(0.4)).unwrap(),
            &MultiplierSpec::frac(0.9),
        )
        .unwrap();
        let b = apply_multiplier(&f0, &MultiplierSpec::frac(1.3)).unwrap();
        assert!(a.sub(&b).unwrap().l2_norm() <= 1e-12 * b.l2_norm());
    }

    #[test]
    fn heat_semigroup() {
        let g = GridSpec::square(32).unwrap();
        let f = random_field(g, 5, 1.0);
        let a = apply_multiplier(
            &apply_multiplier(&f, &MultiplierSpec::heat(1.0, 0.1, 0.5)).unwrap(),
            &MultiplierSpec::heat(1.0, 0.25, 0.5),
        )
        .unwrap();
        let b = apply_multiplier(&f, &MultiplierSpec::heat(1.0, 0.35, 0.5)).unwrap();
        assert!(a.sub(&b).unwrap().l2_norm() <= 1e-12 * b.l2_norm());
    }

    #[test]
    fn riesz_perp_of_cosine() {
        let g = GridSpec::square(32).unwrap();
        let (m1, m2) = (2i64, -3i64);
        let theta = SpectralField::cosine_mode(g, m1, m2, 1.0);
        let (u1, u2) = riesz_perp(&theta);
        let a = inverse_transform(&u1).unwrap();
        let b = inverse_transform(&u2).unwrap();
        let r = ((m1 * m1 + m2 * m2) as f64).sqrt();
        // R^⊥ cos(k·x) = -(k^⊥/|k|) sin(k·x)
        let expect1 = sample(&g, |x, y| (m2 as f64 / r) * (m1 as f64 * x + m2 as f64 * y).sin());
        let expect2 = sample(&g, |x, y| -(m1 as f64 / r) * (m1 as f64 * x + m2 as f64 * y).sin());
        assert!((&a - &expect1).iter().fold(0.0f64, |m, v| m.max(v.abs())) < 1e-13);
        assert!((&b - &expect2).iter().fold(0.0f64, |m, v| m.max(v.abs())) < 1e-13);
    }

    #[test]
    fn riesz_perp_is_divergence_free_and_isometric() {
        let g = GridSpec::square(32).unwrap();
        let mut f = random_field(g, 9, 0.5);
        f.coeffs_mut()[[0, 0]] = Complex64::default();
        // drop Nyquist lines so the isometry is exact
        let n = g.n();
        for i in 0..n {
            f.coeffs_mut()[[n / 2, i]] = Complex64::default();
            f.coeffs_mut()[[i, n / 2]] = Complex64::default();
        }
        let (u1, u2) = riesz_perp(&f);
        let kmax = g.max_wavenumber();
        assert!(spectral_divergence_defect(&u1, &u2) <= 4.0 * f64::EPSILON * kmax * f.max_abs());
        let e = (u1.l2_norm().powi(2) + u2.l2_norm().powi(2)).sqrt();
        assert!((e - f.l2_norm()).abs() < 1e-12 * f.l2_norm());
    }

    #[test]
    fn gradient_of_sine() {
        let g = GridSpec::square(16).unwrap();
        let f = forward_transform(&sample(&g, |x, y| (2.0 * x + y).sin()), &g).unwrap();
        let (gx, gy) = gradient(&f);
        let a = inverse_transform(&gx).unwrap();
        let b = inverse_transform(&gy).unwrap();
        let ea = sample(&g, |x, y| 2.0 * (2.0 * x + y).cos());
        let eb = sample(&g, |x, y| (2.0 * x + y).cos());
        assert!((&a - &ea).iter().fold(0.0f64, |m, v| m.max(v.abs())) < 1e-13);
        assert!((&b - &eb).iter().fold(0.0f64, |m, v| m.max(v.abs())) < 1e-13);
        let div = divergence(&gx, &gy).unwrap();
        let lap = apply_multiplier(&f, &MultiplierSpec::frac(2.0)).unwrap();
        assert!(div.add(&lap).unwrap().l2_norm() < 1e-12);
    }

    #[test]
    fn block_symbol_passes_centered_mode() {
        let g = GridSpec::square(64).unwrap();
        let f = SpectralField::cosine_mode(g, 8, 0, 1.0);
        let p = apply_multiplier(&f, &MultiplierSpec::Block { j: 3 }).unwrap();
        assert_eq!(p, f);
        assert!(sobolev_norm(&f, 0.0, true).is_ok());
    }
}
