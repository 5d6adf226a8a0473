//! The pointwise inequality
//! (a-b)(|a|^{q-2}a - |b|^{q-2}b) ≥ 4(q-1)/q²·(|a|^{q/2-1}a - |b|^{q/2-1}b)².

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::coercivity::coercivity_constant;
use super::report::{InequalityReport, LemmaId, TheoreticalBound, Verdict};
use super::sampler::sample_rng;
use crate::error::{Result, SqgError};

/// Relative slack below which a triple counts as a violation.
pub const AB_SLACK: f64 = -1e-12;

/// sgn(a)|a|^p - sgn(b)|b|^p without cancellation when a ≈ b.
pub fn signed_pow_diff(a: f64, b: f64, p: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if a != 0.0 && b != 0.0 && a.signum() == b.signum() {
        let (x, y) = (a.abs(), b.abs());
        // x^p - y^p = y^p·expm1(p·ln(1 + (x-y)/y))
        a.signum() * y.powf(p) * (p * ((x - y) / y).ln_1p()).exp_m1()
    } else {
        a.signum() * a.abs().powf(p) - b.signum() * b.abs().powf(p)
    }
}

/// Both sides of the inequality at (a, b, q).
pub fn ab_sides(a: f64, b: f64, q: f64) -> (f64, f64) {
    let lhs = (a - b) * signed_pow_diff(a, b, q - 1.0);
    let d = signed_pow_diff(a, b, 0.5 * q);
    (lhs, coercivity_constant(q) * d * d)
}

/// (LHS - RHS)/max(LHS, RHS), zero when both vanish.
pub fn relative_slack(a: f64, b: f64, q: f64) -> f64 {
    let (l, r) = ab_sides(a, b, q);
    let scale = l.abs().max(r.abs());
    if scale == 0.0 {
        0.0
    } else {
        (l - r) / scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbSetup {
    pub qs: Vec<f64>,
    /// Every (a, b) pair from this list is checked for every q.
    pub values: Vec<f64>,
    /// Extra random triples, with q in (1, q_max] unless a single q is given.
    pub random_samples: u64,
    pub q_max: f64,
    pub seed: u64,
}

impl AbSetup {
    /// 100 exponents q = 1 + 10^{-2..1.3} against ±10^{-3..1} on 50 log-spaced
    /// magnitudes: 10⁶ deterministic triples.
    pub fn grid(random_samples: u64, seed: u64) -> Self {
        let qs = (0..100)
            .map(|i| 1.0 + 10f64.powf(-2.0 + 3.3 * i as f64 / 99.0))
            .collect();
        let mut values: Vec<f64> = (0..50).map(|k| 10f64.powf(-3.0 + 4.0 * k as f64 / 49.0)).collect();
        values.extend(values.clone().iter().map(|v| -v));
        Self {
            qs,
            values,
            random_samples,
            q_max: 20.0,
            seed,
        }
    }

    /// One exponent against the same (a, b) grid.
    pub fn single(q: f64, random_samples: u64, seed: u64) -> Self {
        Self {
            qs: vec![q],
            q_max: q,
            ..Self::grid(random_samples, seed)
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Tally {
    count: u64,
    violations: u64,
    worst: f64,
    at: (f64, f64, f64),
}

impl Tally {
    fn new() -> Self {
        Self {
            count: 0,
            violations: 0,
            worst: f64::INFINITY,
            at: (0.0, 0.0, 0.0),
        }
    }

    fn add(&mut self, a: f64, b: f64, q: f64) {
        let s = relative_slack(a, b, q);
        self.count += 1;
        if s < AB_SLACK {
            self.violations += 1;
        }
        if s < self.worst {
            self.worst = s;
            self.at = (a, b, q);
        }
    }

    fn merge(mut self, o: Tally) -> Tally {
        self.count += o.count;
        self.violations += o.violations;
        if o.worst < self.worst {
            self.worst = o.worst;
            self.at = o.at;
        }
        self
    }
}

/// Checks every (a, b, q) of the grid plus random triples. Passes iff no
/// relative slack falls below [`AB_SLACK`].
pub fn check_ab_inequality(setup: &AbSetup) -> Result<InequalityReport> {
    if setup.qs.iter().any(|&q| !(q > 1.0 && q.is_finite())) || !(setup.q_max > 1.0) {
        return Err(SqgError::param("pointwise inequality needs 1 < q < inf"));
    }
    let per_q: Vec<Tally> = setup
        .qs
        .par_iter()
        .map(|&q| {
            let mut t = Tally::new();
            for &a in &setup.values {
                for &b in &setup.values {
                    t.add(a, b, q);
                }
            }
            t
        })
        .collect();
    let random: Vec<Tally> = (0..setup.random_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(setup.seed, i);
            let q = if let [q] = setup.qs[..] {
                q
            } else {
                1.0 + (setup.q_max - 1.0) * (1.0 - rng.random::<f64>())
            };
            let mut draw = || {
                let z: f64 = rng.sample(StandardNormal);
                z * 10f64.powf(rng.random_range(-3.0..1.0))
            };
            let (a, b) = (draw(), draw());
            let mut t = Tally::new();
            t.add(a, b, q);
            t
        })
        .collect();
    let total = per_q.into_iter().chain(random).fold(Tally::new(), Tally::merge);

    let mut r = InequalityReport::new(LemmaId::AbPointwise, setup.seed).threshold("relative_slack", AB_SLACK);
    if let [q] = setup.qs[..] {
        r.parameters.insert("q".into(), q);
    } else {
        r.parameters.insert("q_count".into(), setup.qs.len() as f64);
    }
    r.parameters.insert("ab_values".into(), setup.values.len() as f64);
    r.n_samples = total.count;
    r.measured_constant = total.worst;
    r.theoretical_bound = TheoreticalBound::Value(0.0);
    r.verdict = Verdict::from_bool(total.violations == 0);
    r.measure("violations", total.violations as f64);
    r.measure("worst_a", total.at.0);
    r.measure("worst_b", total.at.1);
    r.measure("worst_q", total.at.2);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_values() {
        assert_eq!(ab_sides(1.0, 0.0, 2.0), (1.0, 1.0));
        let (l, r) = ab_sides(1.0, -1.0, 4.0);
        assert!((l - 4.0).abs() < 1e-15 && (r - 3.0).abs() < 1e-15);
        assert_eq!(ab_sides(0.7, 0.7, 3.0), (0.0, 0.0));
    }

    #[test]
    fn accurate_near_diagonal() {
        // near a = b both sides agree to leading order, so cancellation would
        // show up as a spurious violation
        for q in [1.1, 1.5, 3.0, 7.0] {
            for d in [1e-6, 1e-9, 1e-12] {
                assert!(relative_slack(1.0 + d, 1.0, q) >= AB_SLACK, "q={q} d={d}");
                assert!(relative_slack(-3.0, -3.0 * (1.0 + d), q) >= AB_SLACK);
            }
        }
        let exact = 1.5f64.powf(2.5) - 1.0;
        assert!((signed_pow_diff(1.5, 1.0, 2.5) - exact).abs() < 1e-15);
        assert!((signed_pow_diff(-2.0, 1.0, 0.5) + 2f64.sqrt() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_q_grid_passes() {
        let r = check_ab_inequality(&AbSetup::single(4.0, 1000, 3)).unwrap();
        assert!(r.passed());
        assert_eq!(r.n_samples, 10_000 + 1000);
        assert!(check_ab_inequality(&AbSetup::single(1.0, 0, 0)).is_err());
    }
}
