//! Residual of the Duhamel form
//! θ(t) = e^{-(t-t₀)νD^γ}θ(t₀) + ∫_{t₀}^t e^{-(t-s)νD^γ} N(θ(s)) ds.

use super::run::{TimeSeries, Transport};
use crate::error::{Result, SqgError};
use crate::quadrature::simpson_uniform;
use crate::spectral::SpectralField;

/// Quadrature weights on the nodes: composite Simpson when they are
/// uniformly spaced, trapezoid otherwise.
fn weights(nodes: &[f64]) -> Vec<f64> {
    let m = nodes.len();
    let h = nodes[1] - nodes[0];
    let uniform = nodes.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
    if uniform {
        (0..m)
            .map(|i| {
                let mut e = vec![0.0; m];
                e[i] = 1.0;
                simpson_uniform(&e, h)
            })
            .collect()
    } else {
        let mut w = vec![0.0; m];
        for i in 0..m - 1 {
            let d = 0.5 * (nodes[i + 1] - nodes[i]);
            w[i] += d;
            w[i + 1] += d;
        }
        w
    }
}

/// ‖LHS - RHS‖₂ / ‖θ(t)‖₂ using the stored states in [t₀, t], which must
/// include both endpoints.
pub fn mild_residual(series: &TimeSeries, t0: f64, t: f64) -> Result<f64> {
    if !(t > t0) {
        return Err(SqgError::param(format!("mild residual needs t > t0, got [{t0}, {t}]")));
    }
    let tol = 1e-9 * t.abs().max(1.0);
    let nodes: Vec<&(f64, SpectralField)> = series
        .states
        .iter()
        .filter(|(s, _)| *s >= t0 - tol && *s <= t + tol)
        .collect();
    let ok = nodes.len() >= 2 && (nodes[0].0 - t0).abs() <= tol && (nodes[nodes.len() - 1].0 - t).abs() <= tol;
    if !ok {
        return Err(SqgError::InsufficientStates(format!(
            "{} stored states in [{t0}, {t}], endpoints required",
            nodes.len()
        )));
    }
    let cfg = &series.config;
    let (nu, gamma) = (cfg.nu, cfg.gamma);
    let transport = Transport::new(cfg);
    let times: Vec<f64> = nodes.iter().map(|(s, _)| *s).collect();
    let w = weights(&times);
    let grid = cfg.grid;
    let radial = grid.radial_wavenumbers();
    let rate: Vec<f64> = radial.iter().map(|r| -nu * r.powf(gamma)).collect();
    let end = &nodes[nodes.len() - 1].1;
    let mut rhs = nodes[0].1.clone();
    for (c, l) in rhs.as_slice_mut().iter_mut().zip(&rate) {
        *c *= (l * (t - t0)).exp();
    }
    if cfg.nonlinear {
        for ((s, theta), wi) in nodes.iter().zip(&w) {
            let (n, _) = transport.eval(theta)?;
            for ((c, a), l) in rhs.as_slice_mut().iter_mut().zip(n.as_slice()).zip(&rate) {
                *c += a * (wi * (l * (t - s)).exp());
            }
        }
    }
    let num = end.sub(&rhs)?.l2_norm();
    let den = end.l2_norm();
    if den == 0.0 {
        return Ok(num);
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::PowerLaw;
    use crate::solver::{run_simulation, SolverConfig};
    use crate::spectral::GridSpec;

    #[test]
    fn linear_residual_vanishes() {
        let g = GridSpec::square(32).unwrap();
        let th = PowerLaw::new(2.0, 1.0, 10.0).sample(g, 3);
        let cfg = SolverConfig {
            nonlinear: false,
            store_every: Some(5),
            ..SolverConfig::new(g, 1.0, 0.5, 0.01, 0.2)
        };
        let s = run_simulation(&th, &cfg).unwrap();
        assert!(mild_residual(&s, 0.0, 0.2).unwrap() < 1e-10);
        assert!(mild_residual(&s, 0.05, 0.15).unwrap() < 1e-10);
    }

    #[test]
    fn nonlinear_residual_small_and_convergent() {
        let g = GridSpec::square(64).unwrap();
        let th = PowerLaw::new(3.0, 1.0, 15.0).sample(g, 9);
        let res = |dt: f64, every: usize| {
            let cfg = SolverConfig {
                store_every: Some(every),
                ..SolverConfig::new(g, 1.0, 0.5, dt, 0.2)
            };
            mild_residual(&run_simulation(&th, &cfg).unwrap(), 0.0, 0.2).unwrap()
        };
        let a = res(0.01, 2);
        let b = res(0.005, 4);
        assert!(a < 1e-4, "{a}");
        assert!(b < a, "{a} {b}");
    }

    #[test]
    fn requires_endpoints() {
        let g = GridSpec::square(16).unwrap();
        let th = SpectralField::cosine_mode(g, 1, 0, 1.0);
        let cfg = SolverConfig::new(g, 1.0, 0.5, 0.01, 0.1);
        let s = run_simulation(&th, &cfg).unwrap();
        assert!(matches!(
            mild_residual(&s, 0.0, 0.1),
            Err(SqgError::InsufficientStates(_))
        ));
    }
}
