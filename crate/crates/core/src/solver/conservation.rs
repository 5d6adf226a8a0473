//! Maximum principle, Hamiltonian decay and the L² energy balance of a run.

use serde::{Deserialize, Serialize};

use super::diagnostics::StepRecord;
use super::run::TimeSeries;
use crate::quadrature::simpson_uniform;

/// Allowed relative increase of a nonincreasing quantity over one step.
pub const MONOTONE_SLACK: f64 = 1e-6;

/// Largest relative one-step increase of a quantity, zero if it never grows.
fn worst_increase(steps: &[StepRecord], get: impl Fn(&StepRecord) -> f64) -> f64 {
    steps
        .windows(2)
        .map(|w| {
            let (a, b) = (get(&w[0]), get(&w[1]));
            if a > 0.0 {
                (b - a) / a
            } else if b > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .fold(0.0f64, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub steps: usize,
    pub worst_l2_increase: f64,
    pub worst_linf_increase: f64,
    pub worst_hminus_half_increase: f64,
    pub l2_monotone: bool,
    pub linf_monotone: bool,
    pub hminus_half_monotone: bool,
    /// max_t |‖θ(t)‖₂ - ‖θ₀‖₂| / ‖θ₀‖₂
    pub l2_drift: f64,
    /// max_t |mean θ(t) - mean θ₀|
    pub mean_drift: f64,
    /// ‖θ(T)‖₂² - ‖θ₀‖₂² + 2ν∫‖D^{γ/2}θ‖₂², absolute.
    pub energy_residual: f64,
    /// The same divided by ‖θ₀‖₂².
    pub energy_residual_relative: f64,
    /// "simpson" on uniform steps, "trapezoid" otherwise.
    pub energy_quadrature: String,
}

impl ConservationReport {
    pub fn monotone(&self) -> bool {
        self.l2_monotone && self.linf_monotone && self.hminus_half_monotone
    }
}

/// Checks the per-step records of `series`.
pub fn conservation_report(series: &TimeSeries) -> ConservationReport {
    let steps = &series.steps;
    let nu = series.config.nu;
    let l2_inc = worst_increase(steps, |r| r.l2);
    let linf_inc = worst_increase(steps, |r| r.linf);
    let hm_inc = worst_increase(steps, |r| r.hminus_half);
    let (first, last) = (steps.first(), steps.last());
    let l0 = first.map_or(0.0, |r| r.l2);
    let m0 = first.map_or(0.0, |r| r.mean);
    let l2_drift = steps.iter().map(|r| (r.l2 - l0).abs()).fold(0.0, f64::max) / l0.max(f64::MIN_POSITIVE);
    let mean_drift = steps.iter().map(|r| (r.mean - m0).abs()).fold(0.0, f64::max);

    let values: Vec<f64> = steps.iter().map(|r| r.dissipation).collect();
    let uniform = steps.len() >= 2 && {
        let h = steps[1].t - steps[0].t;
        steps.windows(2).all(|w| ((w[1].t - w[0].t) - h).abs() <= 1e-9 * h)
    };
    let (integral, quad) = if uniform {
        (simpson_uniform(&values, steps[1].t - steps[0].t), "simpson")
    } else {
        let s = steps
            .windows(2)
            .map(|w| 0.5 * (w[1].t - w[0].t) * (w[0].dissipation + w[1].dissipation))
            .sum();
        (s, "trapezoid")
    };
    let residual = match (first, last) {
        (Some(a), Some(b)) => b.l2 * b.l2 - a.l2 * a.l2 + 2.0 * nu * integral,
        _ => 0.0,
    };
    ConservationReport {
        steps: steps.len(),
        worst_l2_increase: l2_inc,
        worst_linf_increase: linf_inc,
        worst_hminus_half_increase: hm_inc,
        l2_monotone: l2_inc <= MONOTONE_SLACK,
        linf_monotone: linf_inc <= MONOTONE_SLACK,
        hminus_half_monotone: hm_inc <= MONOTONE_SLACK,
        l2_drift,
        mean_drift,
        energy_residual: residual.abs(),
        energy_residual_relative: residual.abs() / (l0 * l0).max(f64::MIN_POSITIVE),
        energy_quadrature: quad.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::PowerLaw;
    use crate::solver::{run_simulation, SolverConfig};
    use crate::spectral::GridSpec;

    #[test]
    fn linear_run_balances() {
        let g = GridSpec::square(32).unwrap();
        let th = PowerLaw::new(2.0, 1.0, 8.0).sample(g, 1);
        let cfg = SolverConfig {
            nonlinear: false,
            ..SolverConfig::new(g, 1.0, 1.0, 0.01, 0.2)
        };
        let r = conservation_report(&run_simulation(&th, &cfg).unwrap());
        assert!(r.monotone(), "{r:?}");
        assert_eq!(r.energy_quadrature, "simpson");
        assert!(r.energy_residual_relative < 1e-6, "{r:?}");
        assert_eq!(r.mean_drift, 0.0);
    }

    #[test]
    fn nonlinear_run_is_monotone() {
        let g = GridSpec::square(64).unwrap();
        let th = PowerLaw::new(3.0, 1.0, 12.0).sample(g, 4);
        let r = conservation_report(&run_simulation(&th, &SolverConfig::new(g, 1.0, 0.5, 2e-3, 0.1)).unwrap());
        assert!(r.monotone(), "{r:?}");
        assert!(r.energy_residual_relative < 1e-8, "{r:?}");
    }
}
