//! Approximation sequences: Galerkin truncations and the linear Picard
//! scheme, each integrated as one system in lockstep.

use std::cell::Cell;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::config::SolverConfig;
use super::diagnostics::Diagnostics;
use super::rhs::{advection, check_mean_free};
use super::run::{gevrey_horizon, CFL_ABORT};
use super::stepper::Stepper;
use crate::error::{Result, SqgError};
use crate::fit::{log2_fit, LineFit};
use crate::littlewood_paley::partition::OUTER_RADIUS;
use crate::littlewood_paley::{besov_norm, project_low, DyadicPartition};
use crate::spectral::{apply_multiplier, MultiplierSpec, SpectralField, DEFAULT_GEVREY_CAP};

/// Regularity of the low Besov norm tracked by the Picard scheme.
pub const DEFAULT_S0: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Galerkin,
    Picard,
}

/// Time suprema over the output times of one field.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    /// C_t L²
    pub l2: f64,
    /// C_t B^{s₀}_{p,∞}
    pub besov_s0: f64,
    /// C_t H^{2-γ}
    pub h_s: f64,
    /// sup_t ‖e^{ε₀tD^γ}·‖_{H^{2-γ}}
    pub gevrey_h_s: f64,
    /// sup_t ‖e^{½tD^γ}·‖_{B^{1-γ+2/p}_{p,q}}
    pub gevrey_besov: f64,
}

impl NormRow {
    fn max(self, o: NormRow) -> NormRow {
        NormRow {
            l2: self.l2.max(o.l2),
            besov_s0: self.besov_s0.max(o.besov_s0),
            h_s: self.h_s.max(o.h_s),
            gevrey_h_s: self.gevrey_h_s.max(o.gevrey_h_s),
            gevrey_besov: self.gevrey_besov.max(o.gevrey_besov),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateTrace {
    pub scheme: Scheme,
    pub ns: Vec<i32>,
    pub p: f64,
    pub q: f64,
    pub s0: f64,
    /// Realized time window.
    pub t_final: f64,
    /// Norms of each iterate, aligned with `ns`.
    pub norms: Vec<NormRow>,
    /// Norms of iterate(ns[i+1]) - iterate(ns[i]).
    pub diffs: Vec<NormRow>,
    /// log₂ of the tracked difference against n: C_tL² for Galerkin,
    /// C_tB^{s₀}_{p,∞} for Picard.
    pub rate: Option<LineFit>,
    /// Successive ratios of the tracked difference.
    pub ratios: Vec<f64>,
    /// Picard: ‖θ^{(n+1)}(0) - θ^{(n)}(0)‖_{B^{s₀}_{p,∞}} per consecutive pair.
    pub data_diffs: Vec<f64>,
    pub data_rate: Option<LineFit>,
    /// Galerkin: largest relative ℓ² mass outside the cutoff support, over
    /// all steps and iterates.
    pub support_defect: f64,
    pub notes: Vec<String>,
}

impl IterateTrace {
    fn tracked(&self) -> Vec<f64> {
        self.diffs
            .iter()
            .map(|d| match self.scheme {
                Scheme::Galerkin => d.l2,
                Scheme::Picard => d.besov_s0,
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "kind,n,l2,besov_s0,h_s,gevrey_h_s,gevrey_besov")?;
        let rows = self.ns.iter().zip(&self.norms).map(|(n, r)| ("iterate", n, r));
        let diffs = self.ns.iter().zip(&self.diffs).map(|(n, r)| ("difference", n, r));
        for (kind, n, r) in rows.chain(diffs) {
            writeln!(
                w,
                "{kind},{n},{:e},{:e},{:e},{:e},{:e}",
                r.l2, r.besov_s0, r.h_s, r.gevrey_h_s, r.gevrey_besov
            )?;
        }
        Ok(())
    }
}

struct Norms<'a> {
    diag: Diagnostics,
    config: &'a SolverConfig,
    p: f64,
    q: f64,
    s0: f64,
}

impl Norms<'_> {
    fn row(&self, f: &SpectralField, t: f64) -> Result<NormRow> {
        let gamma = self.config.gamma;
        let s = 2.0 - gamma;
        let weighted = apply_multiplier(f, &MultiplierSpec::gevrey(0.5, t, gamma))?;
        Ok(NormRow {
            l2: f.l2_norm(),
            besov_s0: besov_norm(f, self.s0, self.p, f64::INFINITY)?,
            h_s: self.diag.gevrey_sobolev(f, 0.0, 0.0, s),
            gevrey_h_s: self.diag.gevrey_sobolev(f, self.config.gevrey_epsilon0, t, s),
            gevrey_besov: besov_norm(&weighted, 1.0 - gamma + 2.0 / self.p, self.p, self.q)?,
        })
    }
}

/// Running suprema of iterates and consecutive differences.
struct Tracker<'a> {
    norms: Norms<'a>,
    iterates: Vec<NormRow>,
    diffs: Vec<NormRow>,
}

impl<'a> Tracker<'a> {
    fn new(norms: Norms<'a>, count: usize) -> Self {
        Self {
            norms,
            iterates: vec![NormRow::default(); count],
            diffs: vec![NormRow::default(); count.saturating_sub(1)],
        }
    }

    fn observe(&mut self, fields: &[SpectralField], t: f64) -> Result<()> {
        for (i, f) in fields.iter().enumerate() {
            self.iterates[i] = self.iterates[i].max(self.norms.row(f, t)?);
        }
        for i in 0..self.diffs.len() {
            let d = fields[i + 1].sub(&fields[i])?;
            self.diffs[i] = self.diffs[i].max(self.norms.row(&d, t)?);
        }
        Ok(())
    }
}

fn preflight(theta0: &SpectralField, config: &SolverConfig) -> Result<()> {
    config.validate()?;
    theta0.check_grid(&SpectralField::zeros(config.grid))?;
    check_mean_free(theta0, "initial data")?;
    let e = gevrey_horizon(config);
    if e > DEFAULT_GEVREY_CAP {
        return Err(SqgError::OverflowGuard {
            guard: "gevrey_horizon",
            exponent: e,
            cap: DEFAULT_GEVREY_CAP,
        });
    }
    Ok(())
}

/// Integrates the system to `t_final`, calling `each_step` after every step
/// and `observe` at t = 0, every `output_every` steps and at the end.
fn lockstep<R, S, O>(
    mut y: Vec<SpectralField>,
    config: &SolverConfig,
    rhs: R,
    mut each_step: S,
    mut observe: O,
) -> Result<f64>
where
    R: Fn(&[SpectralField]) -> Result<(Vec<SpectralField>, f64)>,
    S: FnMut(&[SpectralField]) -> Result<()>,
    O: FnMut(&[SpectralField], f64) -> Result<()>,
{
    let (full, rest) = config.step_plan();
    let total = full + rest.is_some() as u64;
    let grid = &config.grid;
    let main = Stepper::new(grid, config.nu, config.gamma, config.dt, config.integrator);
    let last = rest.map(|h| Stepper::new(grid, config.nu, config.gamma, h, config.integrator));
    observe(&y, 0.0)?;
    let mut t = 0.0;
    for i in 1..=total {
        let stepper = if i <= full {
            &main
        } else {
            last.as_ref().expect("partial step")
        };
        let umax = Cell::new(None);
        let next = stepper.advance(&y, |s| {
            let (out, u) = rhs(s)?;
            if umax.get().is_none() {
                umax.set(Some(u));
            }
            Ok(out)
        });
        let courant = stepper.h * umax.get().unwrap_or(0.0) * grid.dealias_radius();
        if courant > CFL_ABORT {
            return Err(SqgError::Cfl { courant, t });
        }
        y = next.map_err(|e| match e {
            SqgError::NonFinite { .. } => SqgError::NonFinite { t: t + stepper.h },
            e => e,
        })?;
        t = if i <= full {
            i as f64 * config.dt
        } else {
            config.t_final
        };
        each_step(&y)?;
        if i % config.output_every as u64 == 0 || i == total {
            observe(&y, t)?;
        }
    }
    Ok(t)
}

fn check_range(ns: &[i32], lowest: i32, highest: i32, what: &str) -> Result<()> {
    if ns.len() < 2 || ns.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(SqgError::param(format!(
            "{what} needs at least two consecutive indices"
        )));
    }
    if ns[0] < lowest || ns[ns.len() - 1] > highest {
        return Err(SqgError::param(format!(
            "{what} range {}..={} outside the grid's dyadic range {lowest}..={highest}",
            ns[0],
            ns[ns.len() - 1]
        )));
    }
    Ok(())
}

fn finish(mut trace: IterateTrace) -> IterateTrace {
    let tracked = trace.tracked();
    let x: Vec<f64> = trace.ns[..tracked.len()].iter().map(|&n| n as f64).collect();
    trace.rate = log2_fit(&x, &tracked);
    trace.ratios = tracked.windows(2).map(|w| w[1] / w[0]).collect();
    if !trace.data_diffs.is_empty() {
        trace.data_rate = log2_fit(&x, &trace.data_diffs);
    }
    trace
}

/// θ^{(n)} solves ∂_tθ = -P_{<n}(R^⊥P_{<n}θ·∇P_{<n}θ) - νD^γθ with data
/// P_{<n}θ₀, where P_{<n} = P_{≤n-1}.
pub fn galerkin_sequence(theta0: &SpectralField, ns: &[i32], config: &SolverConfig) -> Result<IterateTrace> {
    preflight(theta0, config)?;
    let part = DyadicPartition::for_grid(&config.grid);
    check_range(ns, part.j_low + 2, part.verified_j_max + 1, "Galerkin sequence")?;
    let cutoffs: Vec<i32> = ns.iter().map(|n| n - 1).collect();
    let radial = config.grid.radial_wavenumbers();
    let outside: Vec<Vec<bool>> = cutoffs
        .iter()
        .map(|&j| radial.iter().map(|&r| r > OUTER_RADIUS * (j as f64).exp2()).collect())
        .collect();
    let y0: Vec<SpectralField> = cutoffs.iter().map(|&j| project_low(theta0, j)).collect();

    let norms = Norms {
        diag: Diagnostics::new(config),
        config,
        p: config.besov_p,
        q: config.besov_q,
        s0: DEFAULT_S0,
    };
    let mut tracker = Tracker::new(norms, ns.len());
    let mut defect = 0.0f64;
    let mut scan = |y: &[SpectralField]| -> Result<()> {
        for (f, mask) in y.iter().zip(&outside) {
            let out: f64 = f
                .as_slice()
                .iter()
                .zip(mask)
                .filter(|(_, m)| **m)
                .map(|(c, _)| c.norm_sqr())
                .sum();
            let total = f.coeff_norm();
            if total > 0.0 {
                defect = defect.max(out.sqrt() / total);
            }
        }
        Ok(())
    };
    scan(&y0)?;
    let nonlinear = config.nonlinear;
    let rhs = |y: &[SpectralField]| -> Result<(Vec<SpectralField>, f64)> {
        let mut umax = 0.0f64;
        let mut out = Vec::with_capacity(y.len());
        for (f, &j) in y.iter().zip(&cutoffs) {
            if !nonlinear {
                out.push(SpectralField::zeros(*f.grid()));
                continue;
            }
            let p = project_low(f, j);
            let (a, u) = advection(&p, &p)?;
            umax = umax.max(u);
            out.push(project_low(&a, j).scaled(-1.0));
        }
        Ok((out, umax))
    };
    let t = lockstep(y0, config, rhs, &mut scan, |y, t| tracker.observe(y, t))?;
    let trace = IterateTrace {
        scheme: Scheme::Galerkin,
        ns: ns.to_vec(),
        p: config.besov_p,
        q: config.besov_q,
        s0: DEFAULT_S0,
        t_final: t,
        norms: tracker.iterates,
        diffs: tracker.diffs,
        rate: None,
        ratios: Vec::new(),
        data_diffs: Vec::new(),
        data_rate: None,
        support_defect: defect,
        notes: vec!["P_<n realized as P_<=n-1".into()],
    };
    Ok(finish(trace))
}

/// [`picard_besov_sequence_with`] at s₀ = [`DEFAULT_S0`].
pub fn picard_besov_sequence(
    theta0: &SpectralField,
    ns: &[i32],
    p: f64,
    q: f64,
    config: &SolverConfig,
) -> Result<IterateTrace> {
    picard_besov_sequence_with(theta0, ns, p, q, DEFAULT_S0, config)
}

/// θ^{(0)} = 0 and ∂_tθ^{(n+1)} = -R^⊥θ^{(n)}·∇θ^{(n+1)} - νD^γθ^{(n+1)} with
/// data P_{≤n+2}θ₀. Every θ^{(k)} up to the last requested is integrated in
/// one coupled system; the trace records θ^{(n+1)} for n in `ns`.
pub fn picard_besov_sequence_with(
    theta0: &SpectralField,
    ns: &[i32],
    p: f64,
    q: f64,
    s0: f64,
    config: &SolverConfig,
) -> Result<IterateTrace> {
    preflight(theta0, config)?;
    if !(p >= 1.0 && q >= 1.0) {
        return Err(SqgError::param("Besov exponents must be >= 1"));
    }
    let part = DyadicPartition::for_grid(&config.grid);
    check_range(ns, 0, part.verified_j_max - 2, "Picard sequence")?;
    let last = *ns.last().expect("checked");
    // θ^{(k)} for k = 1..=last+1 with data P_{≤k+1}θ₀
    let y0: Vec<SpectralField> = (1..=last + 1).map(|k| project_low(theta0, k + 1)).collect();
    let first = ns[0] as usize;

    let norms = Norms {
        diag: Diagnostics::new(config),
        config,
        p,
        q,
        s0,
    };
    let data_diffs = y0[first..]
        .windows(2)
        .map(|w| besov_norm(&w[1].sub(&w[0])?, s0, p, f64::INFINITY))
        .collect::<Result<Vec<f64>>>()?;
    let mut tracker = Tracker::new(norms, ns.len());
    let nonlinear = config.nonlinear;
    let rhs = |y: &[SpectralField]| -> Result<(Vec<SpectralField>, f64)> {
        let mut umax = 0.0f64;
        let mut out = Vec::with_capacity(y.len());
        for (k, f) in y.iter().enumerate() {
            if k == 0 || !nonlinear {
                out.push(SpectralField::zeros(*f.grid()));
                continue;
            }
            let (a, u) = advection(&y[k - 1], f)?;
            umax = umax.max(u);
            out.push(a.scaled(-1.0));
        }
        Ok((out, umax))
    };
    let t = lockstep(y0, config, rhs, |_| Ok(()), |y, t| tracker.observe(&y[first..], t))?;
    let trace = IterateTrace {
        scheme: Scheme::Picard,
        ns: ns.to_vec(),
        p,
        q,
        s0,
        t_final: t,
        norms: tracker.iterates,
        diffs: tracker.diffs,
        rate: None,
        ratios: Vec::new(),
        data_diffs,
        data_rate: None,
        support_defect: 0.0,
        notes: vec!["spatial cutoff of the data taken as 1 on the torus".into()],
    };
    Ok(finish(trace))
}
