//! Transport terms, evaluated pseudospectrally with 2/3-rule dealiasing.

use ndarray::Zip;

use crate::error::{Result, SqgError};
use crate::spectral::{divergence, forward_pair, forward_transform, gradient, inverse_pair, riesz_perp, SpectralField};

const MEAN_TOL: f64 = 1e-12;

pub(crate) fn check_mean_free(theta: &SpectralField, context: &'static str) -> Result<()> {
    let m = theta.mean().abs();
    if m > MEAN_TOL * theta.coeff_norm().max(f64::MIN_POSITIVE) {
        return Err(SqgError::NonzeroMean { mean: m, context });
    }
    Ok(())
}

/// Dealiased R^⊥a·∇θ together with max|R^⊥a| on the grid.
pub fn advection(a: &SpectralField, theta: &SpectralField) -> Result<(SpectralField, f64)> {
    a.check_grid(theta)?;
    let (u1, u2) = riesz_perp(a);
    let (g1, g2) = gradient(theta);
    let (u1, u2) = inverse_pair(&u1, &u2)?;
    let (g1, g2) = inverse_pair(&g1, &g2)?;
    let mut umax = 0.0f64;
    let mut w = g1;
    Zip::from(&mut w)
        .and(&u1)
        .and(&u2)
        .and(&g2)
        .for_each(|w, &a1, &a2, &b2| {
            umax = umax.max(a1.hypot(a2));
            *w = a1 * *w + a2 * b2;
        });
    let mut out = forward_transform(&w, theta.grid())?;
    out.dealias_in_place();
    Ok((out, umax))
}

/// -dealias(u·∇θ) with u = R^⊥θ.
pub fn nonlinear_term(theta: &SpectralField) -> Result<SpectralField> {
    check_mean_free(theta, "nonlinear term")?;
    Ok(advection(theta, theta)?.0.scaled(-1.0))
}

/// -dealias(∇·(uθ)), equal to [`nonlinear_term`] because ∇·u = 0.
pub fn nonlinear_term_divergence(theta: &SpectralField) -> Result<SpectralField> {
    check_mean_free(theta, "nonlinear term")?;
    let grid = theta.grid();
    let (u1, u2) = riesz_perp(theta);
    let (u1, u2) = inverse_pair(&u1, &u2)?;
    let (th, _) = inverse_pair(theta, &SpectralField::zeros(*grid))?;
    let (f1, f2) = forward_pair(&(&u1 * &th), &(&u2 * &th), grid)?;
    let mut out = divergence(&f1, &f2)?;
    out.dealias_in_place();
    Ok(out.scaled(-1.0))
}
