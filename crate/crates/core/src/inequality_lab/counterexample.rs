//! The q = 1 estimate fails at γ = 2: for f = sin³x·h(x), whose zeros are all
//! of third order, ∫f″ sgn f = 0 while the fractional analogue stays positive.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::line::{coefficients, SparseSeries};
use super::report::{InequalityReport, LemmaId, TheoreticalBound, Verdict, Witness};
use crate::error::{Result, SqgError};

/// Line grid for the construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineGrid {
    pub n: usize,
    pub period: f64,
}

impl Default for LineGrid {
    fn default() -> Self {
        Self {
            n: 1 << 14,
            period: 16.0 * std::f64::consts::PI,
        }
    }
}

/// h(x) = 1 + amplitude·cos(x/stretch), slowly varying for large `stretch`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub amplitude: f64,
    pub stretch: u32,
}

impl Default for Envelope {
    fn default() -> Self {
        Self {
            amplitude: 0.5,
            stretch: 8,
        }
    }
}

impl Envelope {
    fn eval(&self, x: f64) -> f64 {
        1.0 + self.amplitude * (x / self.stretch as f64).cos()
    }
}

/// |∫(D²f)sgn f| must stay below this multiple of ‖f‖₁.
pub const GAMMA2_TOL: f64 = 1e-6;
/// ∫(D^{3/2}f)sgn f must exceed this multiple of ‖f‖₁.
pub const FRACTIONAL_MIN: f64 = 0.01;
/// Band the construction must live in.
pub const FREQUENCY_BAND: (f64, f64) = (0.5, 4.0);

/// ¼(3 sin x − sin 3x) = sin³x
fn profile(x: f64) -> f64 {
    0.25 * (3.0 * x.sin() - (3.0 * x).sin())
}

fn bisect(f: &SparseSeries, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f.eval(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f.eval(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Zeros of the band-limited `f` in [0, period) and the sign of f right after
/// each. Brackets come from sign changes between grid samples that are not
/// numerically zero.
fn sign_changes(f: &SparseSeries, samples: &[f64], period: f64) -> Vec<(f64, f64)> {
    let n = samples.len();
    let h = period / n as f64;
    let fmax = samples.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let significant: Vec<usize> = (0..n).filter(|&i| samples[i].abs() > 1e-10 * fmax).collect();
    let mut zeros = Vec::new();
    for (k, &i) in significant.iter().enumerate() {
        let next = significant[(k + 1) % significant.len()];
        let (a, b) = if next > i {
            (i as f64 * h, next as f64 * h)
        } else {
            (i as f64 * h, (next + n) as f64 * h)
        };
        if (samples[i] > 0.0) != (samples[next] > 0.0) {
            let z = bisect(f, a, b).rem_euclid(period);
            zeros.push((z, samples[next].signum()));
        }
    }
    zeros.sort_by(|a, b| a.0.total_cmp(&b.0));
    zeros
}

/// ∫ρ sgn f over one period, via the antiderivative of ρ between zeros of f.
fn signed_integral(rho: &SparseSeries, zeros: &[(f64, f64)], sign_at_zero: f64, period: f64) -> f64 {
    if rho.modes.iter().any(|&(k, c)| k == 0.0 && c.norm() > 0.0) {
        // not reached for mean-free f; ρ̂(0) = 0 for every D^γ with γ > 0
        unreachable!("antiderivative needs a mean-free integrand");
    }
    let anti = rho.map(|k, c| c / Complex64::new(0.0, k));
    if zeros.is_empty() {
        return sign_at_zero * (anti.eval(period) - anti.eval(0.0));
    }
    let mut acc = 0.0;
    for (i, &(z, s)) in zeros.iter().enumerate() {
        let end = if i + 1 < zeros.len() {
            zeros[i + 1].0
        } else {
            zeros[0].0 + period
        };
        acc += s * (anti.eval(end) - anti.eval(z));
    }
    acc
}

/// Builds f = sin³x·h(x), confirms its frequencies lie in [1/2, 4] and that
/// h > 0, then integrates (D^γf)sgn f for γ = 2 and γ = 3/2 exactly between
/// the zeros of f.
pub fn counterexample_gamma2_q1(grid: LineGrid, envelope: Envelope) -> Result<InequalityReport> {
    if envelope.amplitude.abs() >= 1.0 {
        return Err(SqgError::Precondition(format!(
            "envelope 1 + {}cos(x/{}) is not positive",
            envelope.amplitude, envelope.stretch
        )));
    }
    if envelope.stretch == 0 {
        return Err(SqgError::param("envelope stretch must be positive"));
    }
    let cycles = grid.period / (std::f64::consts::TAU * envelope.stretch as f64);
    if (cycles - cycles.round()).abs() > 1e-9 || cycles.round() < 1.0 {
        return Err(SqgError::param(format!(
            "period {} must be a multiple of 2π·{}",
            grid.period, envelope.stretch
        )));
    }
    if grid.n < 64 || !grid.n.is_power_of_two() {
        return Err(SqgError::param(format!(
            "line grid needs a power of two >= 64, got {}",
            grid.n
        )));
    }
    let h = grid.period / grid.n as f64;
    let samples: Vec<f64> = (0..grid.n)
        .map(|i| {
            let x = i as f64 * h;
            profile(x) * envelope.eval(x)
        })
        .collect();
    let f = SparseSeries::from_coefficients(&coefficients(&samples), grid.period, 1e-12);
    let (lo, hi) = FREQUENCY_BAND;
    let localized = f.modes.iter().all(|&(k, _)| (lo..=hi).contains(&k.abs()));
    let k_min = f.modes.iter().fold(f64::INFINITY, |a, m| a.min(m.0.abs()));
    let k_max = f.modes.iter().fold(0.0f64, |a, m| a.max(m.0.abs()));

    let zeros = sign_changes(&f, &samples, grid.period);
    let s0 = samples.iter().find(|v| v.abs() > 0.0).map_or(1.0, |v| v.signum());
    let l1 = signed_integral(&f, &zeros, s0, grid.period);
    let d2 = f.map(|k, c| c * k.abs().powi(2));
    let d15 = f.map(|k, c| c * k.abs().powf(1.5));
    let i2 = signed_integral(&d2, &zeros, s0, grid.period);
    let i15 = signed_integral(&d15, &zeros, s0, grid.period);

    let sgn = |v: f64| if v == 0.0 { 0.0 } else { v.signum() };
    let naive = |rho: &SparseSeries| -> f64 {
        (0..grid.n)
            .map(|i| rho.eval(i as f64 * h) * sgn(samples[i]))
            .sum::<f64>()
            * h
    };

    let mut r = InequalityReport::new(LemmaId::CounterexampleGamma2, 0)
        .param("grid_n", grid.n as f64)
        .param("period", grid.period)
        .param("envelope_amplitude", envelope.amplitude)
        .param("envelope_stretch", envelope.stretch as f64)
        .threshold("gamma2_relative_tol", GAMMA2_TOL)
        .threshold("fractional_relative_min", FRACTIONAL_MIN)
        .threshold("band_low", lo)
        .threshold("band_high", hi);
    r.n_samples = 1;
    r.measured_constant = i2.abs() / l1;
    r.theoretical_bound = TheoreticalBound::Value(0.0);
    r.measure("l1", l1);
    r.measure("l1_per_length", l1 / grid.period);
    r.measure("integral_gamma2", i2);
    r.measure("integral_gamma1_5", i15);
    r.measure("ratio_gamma1_5", i15 / l1);
    r.measure("grid_quadrature_gamma2", naive(&d2));
    r.measure("grid_quadrature_gamma1_5", naive(&d15));
    r.measure("zeros", zeros.len() as f64);
    r.measure("k_min", k_min);
    r.measure("k_max", k_max);
    r.measure("localized", if localized { 1.0 } else { 0.0 });
    r.verdict = Verdict::from_bool(localized && i2.abs() < GAMMA2_TOL * l1 && i15 > FRACTIONAL_MIN * l1);
    r.witness = Some(Witness::samples_1d(0, r.measured_constant, &samples));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_construction_passes() {
        let r = counterexample_gamma2_q1(LineGrid::default(), Envelope::default()).unwrap();
        assert!(r.passed(), "{:?}", r.measurements);
        assert_eq!(r.measurements["localized"], 1.0);
        // 16 half periods of sin³, each ∫|sin³| = 4/3, weighted by the mean of h = 1
        assert!((r.measurements["l1"] - 16.0 * 4.0 / 3.0).abs() < 1e-9);
        assert_eq!(r.measurements["zeros"], 16.0);
    }

    #[test]
    fn sign_integral_of_plain_sine() {
        // ∫_0^{2π}(D^γ sin)sgn(sin) = ∫|sin| = 4 for every γ
        let n = 256;
        let p = std::f64::consts::TAU;
        let s: Vec<f64> = (0..n).map(|i| (i as f64 * p / n as f64).sin()).collect();
        let f = SparseSeries::from_coefficients(&coefficients(&s), p, 1e-12);
        let z = sign_changes(&f, &s, p);
        assert_eq!(z.len(), 2);
        assert!((signed_integral(&f, &z, 1.0, p) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_envelope_rejected() {
        let e = Envelope {
            amplitude: 1.2,
            stretch: 8,
        };
        assert!(matches!(
            counterexample_gamma2_q1(LineGrid::default(), e),
            Err(SqgError::Precondition(_))
        ));
    }

    #[test]
    fn period_must_fit_envelope() {
        let g = LineGrid { n: 1024, period: 10.0 };
        assert!(counterexample_gamma2_q1(g, Envelope::default()).is_err());
    }
}
