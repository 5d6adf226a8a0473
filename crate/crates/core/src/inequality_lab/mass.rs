//! Contraction of fields with a fixed share of their spectral mass at high
//! frequency: ‖e^{-tD^γ}g‖₂ ≤ e^{-½ε₀N₀^γt}‖g‖₂ for small t.

use super::report::{InequalityReport, LemmaId, TheoreticalBound, Verdict};
use crate::error::{Result, SqgError};
use crate::spectral::{apply_multiplier, MultiplierSpec, SpectralField};

/// Share of ‖ĝ‖² carried by |k| ≥ n0.
pub fn high_frequency_share(g: &SpectralField, n0: f64) -> f64 {
    let k = g.grid().wavenumbers();
    let (mut hi, mut all) = (0.0, 0.0);
    for ((i1, i2), c) in g.coeffs().indexed_iter() {
        let a = c.norm_sqr();
        all += a;
        if k[i1].hypot(k[i2]) >= n0 {
            hi += a;
        }
    }
    if all == 0.0 {
        0.0
    } else {
        hi / all
    }
}

/// Largest x = N₀^γt for which the worst case, mass 1-ε₀ at frequency 0 and
/// ε₀ at N₀, still obeys (1-ε₀) + ε₀e^{-2x} ≤ e^{-ε₀x}. Any field meeting the
/// precondition decays at least as fast, so the bound holds for t below
/// this x/N₀^γ. `None` when it holds for all x (ε₀ = 1).
pub fn conservative_threshold(eps0: f64) -> Option<f64> {
    let h = |x: f64| (-eps0 * x).exp() - (1.0 - eps0 + eps0 * (-2.0 * x).exp());
    if eps0 >= 1.0 {
        return None;
    }
    // h > 0 just after 0 and h → -(1-ε₀) < 0
    let mut hi = 1.0;
    while h(hi) > 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if h(m) > 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    Some(lo)
}

/// Evaluates the contraction on `t_grid`. The verdict covers the times below
/// the conservative threshold; the largest t from the start of the sorted grid
/// where the bound holds, and the first failure, are reported.
pub fn check_spectral_mass_contraction(
    g: &SpectralField,
    n0: f64,
    eps0: f64,
    gamma: f64,
    t_grid: &[f64],
) -> Result<InequalityReport> {
    if !(eps0 > 0.0 && eps0 <= 1.0) || !(n0 > 0.0) || !(gamma > 0.0 && gamma <= 2.0) {
        return Err(SqgError::param("need 0 < eps0 <= 1, N0 > 0 and 0 < gamma <= 2"));
    }
    if t_grid.is_empty() || t_grid.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
        return Err(SqgError::param("time grid must be nonempty and nonnegative"));
    }
    let share = high_frequency_share(g, n0);
    if share < eps0 {
        return Err(SqgError::Precondition(format!(
            "only {share:.3e} of the spectral mass lies above N0 = {n0}, need {eps0}"
        )));
    }
    let mut ts = t_grid.to_vec();
    ts.sort_by(f64::total_cmp);
    let norm0 = g.l2_norm();
    let rate = 0.5 * eps0 * n0.powf(gamma);
    let t0 = conservative_threshold(eps0).map(|x| x / n0.powf(gamma));
    let mut holds_until = None;
    let mut first_failure = None;
    let mut verified_ok = true;
    let mut worst = f64::INFINITY;
    for &t in &ts {
        let lhs = apply_multiplier(g, &MultiplierSpec::heat(1.0, t, gamma))?.l2_norm();
        let rhs = (-rate * t).exp() * norm0;
        // relative round-off allowance for the t = 0 equality
        let ok = lhs <= rhs * (1.0 + 1e-14);
        let in_scope = t0.map_or(true, |t0| t <= t0);
        if in_scope {
            verified_ok &= ok;
            worst = worst.min((rhs - lhs) / norm0);
        }
        if ok && first_failure.is_none() {
            holds_until = Some(t);
        } else if !ok && first_failure.is_none() {
            first_failure = Some(t);
        }
    }

    let mut r = InequalityReport::new(LemmaId::SpectralMassContraction, 0)
        .param("n0", n0)
        .param("eps0", eps0)
        .param("gamma", gamma)
        .param("t_points", ts.len() as f64);
    r.n_samples = ts.len() as u64;
    r.measured_constant = worst;
    r.theoretical_bound = TheoreticalBound::Value(rate);
    r.measure("high_frequency_share", share);
    r.measure("largest_t_holding", holds_until.unwrap_or(f64::NAN));
    if let Some(t) = first_failure {
        r.measure("first_failure_t", t);
    }
    match t0 {
        Some(t0) => r.measure("conservative_t0", t0),
        None => r
            .notes
            .push("bound holds for every t when eps0 = 1; no threshold".into()),
    }
    r.verdict = Verdict::from_bool(verified_ok && holds_until.is_some());
    Ok(r)
}
