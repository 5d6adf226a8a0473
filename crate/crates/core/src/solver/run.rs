//! Time stepping loop with diagnostics and guards.

use std::cell::Cell;
use std::io::Write;

use super::config::SolverConfig;
use super::diagnostics::{write_samples_csv, Diagnostics, StepRecord, TimeSample};
use super::rhs::{advection, check_mean_free};
use super::stepper::Stepper;
use crate::error::{Result, SqgError};
use crate::littlewood_paley::project_low;
use crate::spectral::{SpectralField, DEFAULT_GEVREY_CAP};

/// Courant number above which a step is flagged.
pub const CFL_WARN: f64 = 1.0;
/// Courant number above which the run aborts.
pub const CFL_ABORT: f64 = 2.0;

/// Right-hand side of a run: full transport, its Galerkin truncation, or nothing.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Transport {
    nonlinear: bool,
    cutoff: Option<i32>,
}

impl Transport {
    pub fn new(config: &SolverConfig) -> Self {
        Self {
            nonlinear: config.nonlinear,
            cutoff: config.galerkin_n.map(|n| n - 1),
        }
    }

    pub fn truncate(&self, theta: &SpectralField) -> SpectralField {
        match self.cutoff {
            Some(j) => project_low(theta, j),
            None => theta.clone(),
        }
    }

    /// Nonlinear term and max|u|.
    pub fn eval(&self, theta: &SpectralField) -> Result<(SpectralField, f64)> {
        if !self.nonlinear {
            return Ok((SpectralField::zeros(*theta.grid()), 0.0));
        }
        let (a, umax) = match self.cutoff {
            Some(_) => {
                let p = self.truncate(theta);
                advection(&p, &p)?
            }
            None => advection(theta, theta)?,
        };
        Ok((self.truncate(&a).scaled(-1.0), umax))
    }
}

/// A field at a time.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub theta: SpectralField,
    pub t: f64,
    pub step: u64,
}

impl SolverState {
    pub fn initial(theta: SpectralField) -> Self {
        Self { theta, t: 0.0, step: 0 }
    }
}

/// Result of one step: the new state and the Courant number dt·max|u|·k_max
/// measured on the old one.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: SolverState,
    pub courant: f64,
}

fn courant(h: f64, umax: f64, config: &SolverConfig) -> f64 {
    h * umax * config.grid.dealias_radius()
}

fn advance(
    stepper: &Stepper,
    transport: &Transport,
    state: &SolverState,
    config: &SolverConfig,
) -> Result<StepOutcome> {
    let umax = Cell::new(None);
    let next = stepper.advance(std::slice::from_ref(&state.theta), |y| {
        let (n, u) = transport.eval(&y[0])?;
        if umax.get().is_none() {
            umax.set(Some(u));
        }
        Ok(vec![n])
    });
    let c = courant(stepper.h, umax.get().unwrap_or(0.0), config);
    if c > CFL_ABORT {
        return Err(SqgError::Cfl { courant: c, t: state.t });
    }
    let mut next = next.map_err(|e| match e {
        SqgError::NonFinite { .. } => SqgError::NonFinite { t: state.t + stepper.h },
        e => e,
    })?;
    Ok(StepOutcome {
        state: SolverState {
            theta: next.pop().expect("one field"),
            t: state.t + stepper.h,
            step: state.step + 1,
        },
        courant: c,
    })
}

/// One step of size `config.dt`.
pub fn step(state: &SolverState, config: &SolverConfig) -> Result<StepOutcome> {
    config.validate()?;
    state.theta.check_grid(&SpectralField::zeros(config.grid))?;
    check_mean_free(&state.theta, "step")?;
    let stepper = Stepper::new(&config.grid, config.nu, config.gamma, config.dt, config.integrator);
    let out = advance(&stepper, &Transport::new(config), state, config)?;
    if out.courant > CFL_WARN {
        log::warn!("Courant number {:.3} at t = {}", out.courant, state.t);
    }
    Ok(out)
}

/// Diagnostics of a run.
#[derive(Debug, Clone)]
pub struct TimeSeries {
    pub config: SolverConfig,
    /// Block indices of [`TimeSample::blocks`].
    pub block_js: Vec<i32>,
    pub samples: Vec<TimeSample>,
    /// One record per step, starting with the initial state.
    pub steps: Vec<StepRecord>,
    /// Stored (t, θ) pairs when `store_every` is set.
    pub states: Vec<(f64, SpectralField)>,
    pub cfl_warnings: u64,
    pub final_state: SpectralField,
    pub notes: Vec<String>,
}

impl TimeSeries {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_samples_csv(&self.samples, &self.block_js, w)
    }

    pub fn write_steps_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "step,t,l2,linf,hminus_half,dissipation,mean,courant")?;
        for r in &self.steps {
            writeln!(
                w,
                "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                r.step, r.t, r.l2, r.linf, r.hminus_half, r.dissipation, r.mean, r.courant
            )?;
        }
        Ok(())
    }

    pub fn final_time(&self) -> f64 {
        self.steps.last().map_or(0.0, |r| r.t)
    }
}

/// Largest Gevrey exponent the diagnostics of a run can reach.
pub fn gevrey_horizon(config: &SolverConfig) -> f64 {
    config.gevrey_epsilon0.max(0.5) * config.t_final * config.grid.dealias_radius().powf(config.gamma)
}

fn preflight(theta0: &SpectralField, config: &SolverConfig) -> Result<()> {
    config.validate()?;
    theta0.check_grid(&SpectralField::zeros(config.grid))?;
    if !theta0.is_finite() {
        return Err(SqgError::NonFinite { t: 0.0 });
    }
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

/// Runs to `t_final`. Errors before the first step return no series; errors
/// during the run return the series up to the last good step.
pub fn simulate(
    theta0: &SpectralField,
    config: &SolverConfig,
) -> std::result::Result<TimeSeries, (Option<Box<TimeSeries>>, SqgError)> {
    if let Err(e) = preflight(theta0, config) {
        return Err((None, e));
    }
    let transport = Transport::new(config);
    let diag = Diagnostics::new(config);
    let theta = transport.truncate(theta0);
    let mut series = TimeSeries {
        config: config.clone(),
        block_js: diag.block_js.clone(),
        samples: Vec::new(),
        steps: Vec::new(),
        states: Vec::new(),
        cfl_warnings: 0,
        final_state: theta.clone(),
        notes: Vec::new(),
    };
    if let Some(n) = config.galerkin_n {
        series.notes.push(format!("Galerkin truncation P_<{n}"));
    }
    match run_loop(&mut series, &diag, &transport, theta, config) {
        Ok(()) => Ok(series),
        Err(e) => {
            series.notes.push(format!("aborted: {e}"));
            Err((Some(Box::new(series)), e))
        }
    }
}

fn run_loop(
    series: &mut TimeSeries,
    diag: &Diagnostics,
    transport: &Transport,
    theta: SpectralField,
    config: &SolverConfig,
) -> Result<()> {
    let (full, rest) = config.step_plan();
    let total = full + rest.is_some() as u64;
    let main = Stepper::new(&config.grid, config.nu, config.gamma, config.dt, config.integrator);
    let last = rest.map(|h| Stepper::new(&config.grid, config.nu, config.gamma, h, config.integrator));

    let mut state = SolverState::initial(theta);
    let mut integral = 0.0;
    let mut integrand = diag.gevrey_dissipation(&state.theta, 0.0);
    series.steps.push(diag.step_record(&state.theta, 0, 0.0, 0.0)?);
    series.samples.push(diag.sample(&state.theta, 0, 0.0, 0.0)?);
    if config.store_every.is_some() {
        series.states.push((0.0, state.theta.clone()));
    }
    for i in 1..=total {
        let stepper = if i <= full {
            &main
        } else {
            last.as_ref().expect("partial step")
        };
        let out = advance(stepper, transport, &state, config)?;
        if out.courant > CFL_WARN {
            if series.cfl_warnings == 0 {
                log::warn!("Courant number {:.3} at t = {}", out.courant, state.t);
            }
            series.cfl_warnings += 1;
        }
        let prev_t = state.t;
        state = out.state;
        state.t = if i <= full {
            i as f64 * config.dt
        } else {
            config.t_final
        };
        let next = diag.gevrey_dissipation(&state.theta, state.t);
        integral += 0.5 * (state.t - prev_t) * (integrand + next);
        integrand = next;
        series
            .steps
            .push(diag.step_record(&state.theta, i, state.t, out.courant)?);
        series.final_state = state.theta.clone();
        if i % config.output_every as u64 == 0 || i == total {
            series.samples.push(diag.sample(&state.theta, i, state.t, integral)?);
        }
        if let Some(s) = config.store_every {
            if i % s as u64 == 0 || i == total {
                series.states.push((state.t, state.theta.clone()));
            }
        }
    }
    if series.cfl_warnings > 0 {
        series.notes.push(format!(
            "{} steps with Courant number above {CFL_WARN}",
            series.cfl_warnings
        ));
    }
    Ok(())
}

/// [`simulate`] without the partial series.
pub fn run_simulation(theta0: &SpectralField, config: &SolverConfig) -> Result<TimeSeries> {
    simulate(theta0, config).map_err(|(_, e)| e)
}
