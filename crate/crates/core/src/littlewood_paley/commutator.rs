use num_complex::Complex64;

use super::partition::{phi, project_block, OUTER_RADIUS};
use crate::error::{Result, SqgError};
use crate::spectral::multiplier::apply_symbol;
use crate::spectral::{
    apply_multiplier, forward_transform, gradient, inverse_pair, riesz_perp, MultiplierSpec, SpectralField,
    DEFAULT_GEVREY_CAP,
};

/// Dealiased u·∇h for u = (u1, u2) and a gradient (h1, h2) given spectrally.
pub(crate) fn dot_product(
    u: &(SpectralField, SpectralField),
    h: &(SpectralField, SpectralField),
) -> Result<SpectralField> {
    let (u1, u2) = inverse_pair(&u.0, &u.1)?;
    let (h1, h2) = inverse_pair(&h.0, &h.1)?;
    let w = &u1 * &h1 + &u2 * &h2;
    let mut out = forward_transform(&w, u.0.grid())?;
    out.dealias_in_place();
    Ok(out)
}

/// B_j(f, g) = P_j e^{tD^γ}(e^{-tD^γ}R^⊥f · ∇e^{-tD^γ}g) - e^{-tD^γ}R^⊥f · ∇P_j g.
///
/// The growing factor only acts on block j, so the guard bounds
/// t·(7/6·2^j)^γ rather than the whole lattice.
pub fn commutator_bj(f: &SpectralField, g: &SpectralField, j: i32, t: f64, gamma: f64) -> Result<SpectralField> {
    commutator_bj_with_cap(f, g, j, t, gamma, DEFAULT_GEVREY_CAP)
}

pub fn commutator_bj_with_cap(
    f: &SpectralField,
    g: &SpectralField,
    j: i32,
    t: f64,
    gamma: f64,
    cap: f64,
) -> Result<SpectralField> {
    f.check_grid(g)?;
    if t < 0.0 {
        return Err(SqgError::param(format!("commutator needs t >= 0, got {t}")));
    }
    let exponent = t * (OUTER_RADIUS * (j as f64).exp2()).powf(gamma);
    if exponent > cap {
        return Err(SqgError::OverflowGuard {
            guard: "commutator_block_weight",
            exponent,
            cap,
        });
    }
    let heat = MultiplierSpec::heat(1.0, t, gamma);
    let (r1, r2) = riesz_perp(f);
    let u = (apply_multiplier(&r1, &heat)?, apply_multiplier(&r2, &heat)?);
    let smoothed_g = apply_multiplier(g, &heat)?;
    let first = dot_product(&u, &gradient(&smoothed_g))?;
    let s = (-j as f64).exp2();
    let first = apply_symbol(
        &first,
        |k1, k2| {
            let r = k1.hypot(k2);
            let w = phi(r * s);
            if w == 0.0 {
                Complex64::default()
            } else {
                Complex64::new(w * (t * r.powf(gamma)).exp(), 0.0)
            }
        },
        false,
    );
    let second = dot_product(&u, &gradient(&project_block(g, j)))?;
    first.sub(&second)
}

/// σ(ξ,η) of B_j as a bilinear symbol acting on (f, g):
/// (iξ^⊥/|ξ| · iη)[φ(2^{-j}(ξ+η)) e^{-t(|ξ|^γ+|η|^γ-|ξ+η|^γ)} - φ(2^{-j}η) e^{-t|ξ|^γ}].
pub fn commutator_symbol(j: i32, t: f64, gamma: f64) -> super::bilinear::BilinearSymbol {
    use super::bilinear::{phase, BilinearSymbol, SymbolSupport};
    let s = (-j as f64).exp2();
    BilinearSymbol::new(
        move |xi, eta| {
            let r = xi[0].hypot(xi[1]);
            if r == 0.0 {
                return Complex64::default();
            }
            // iξ^⊥/|ξ| · iη = -(ξ^⊥·η)/|ξ| with ξ^⊥ = (-ξ₂, ξ₁)
            let dot = -(-xi[1] * eta[0] + xi[0] * eta[1]) / r;
            let sum = [xi[0] + eta[0], xi[1] + eta[1]];
            let a = phi(s * sum[0].hypot(sum[1])) * (-t * phase(xi, eta, gamma)).exp();
            let b = phi(s * eta[0].hypot(eta[1])) * (-t * r.powf(gamma)).exp();
            Complex64::new(dot * (a - b), 0.0)
        },
        SymbolSupport::default(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::PowerLaw;
    use crate::littlewood_paley::bilinear::apply_bilinear_symbol;
    use crate::littlewood_paley::partition::project_low;
    use crate::spectral::GridSpec;

    #[test]
    fn constant_f_gives_zero() {
        let g = GridSpec::square(32).unwrap();
        let f = SpectralField::cosine_mode(g, 0, 0, 3.0);
        let h = PowerLaw::new(1.0, 1.0, 10.0).sample(g, 1);
        let b = commutator_bj(&f, &h, 2, 0.0, 0.5).unwrap();
        assert_eq!(b.max_abs(), 0.0);
    }

    #[test]
    fn matches_symbol_oracle() {
        let g = GridSpec::square(64).unwrap();
        // supports small enough that ξ+η stays inside the dealias disk
        let f = PowerLaw::new(0.5, 1.0, 6.0).sample(g, 3);
        let h = PowerLaw::new(0.5, 1.0, 12.0).sample(g, 4);
        for (j, t) in [(2, 0.0), (3, 0.2), (4, 0.5)] {
            let b = commutator_bj(&f, &h, j, t, 0.5).unwrap();
            let oracle = apply_bilinear_symbol(&commutator_symbol(j, t, 0.5), &f, &h).unwrap();
            let scale = oracle.l2_norm().max(b.l2_norm());
            assert!(scale > 0.0);
            assert!(b.sub(&oracle).unwrap().l2_norm() < 1e-11 * scale, "j={j}");
        }
    }

    #[test]
    fn vanishes_above_support() {
        let g = GridSpec::with_period(128, 2.0 * std::f64::consts::PI / 8.0).unwrap();
        let j0 = 3;
        let f = project_low(&PowerLaw::new(0.0, 1.0, 1e9).sample(g, 8), j0 + 2);
        let h = project_low(&PowerLaw::new(0.0, 1.0, 1e9).sample(g, 9), j0 + 4);
        let b = commutator_bj(&f, &h, j0 + 7, 0.1, 0.5).unwrap();
        assert!(b.l2_norm() < 1e-11 * f.l2_norm() * h.l2_norm());
    }

    #[test]
    fn guard_trips_on_large_block_weight() {
        let g = GridSpec::square(32).unwrap();
        let f = SpectralField::cosine_mode(g, 1, 0, 1.0);
        assert!(matches!(
            commutator_bj(&f, &f, 20, 10.0, 1.0),
            Err(SqgError::OverflowGuard { .. })
        ));
    }
}
