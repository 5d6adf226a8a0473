use serde::{Deserialize, Serialize};

use crate::error::{Result, SqgError};
use crate::spectral::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// Integrating-factor (Lawson) RK4: the linear part is exact.
    IfRk4,
    /// Exponential time differencing RK2 (Cox–Matthews).
    EtdRk2,
}

impl Integrator {
    pub fn order(self) -> u32 {
        match self {
            Integrator::IfRk4 => 4,
            Integrator::EtdRk2 => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Integrator::IfRk4 => "if_rk4",
            Integrator::EtdRk2 => "etd_rk2",
        }
    }
}

fn yes() -> bool {
    true
}

fn two() -> f64 {
    2.0
}

fn ten() -> usize {
    10
}

/// Parameters of a run of ∂_tθ + u·∇θ + νD^γθ = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub nu: f64,
    pub gamma: f64,
    pub dt: f64,
    pub t_final: f64,
    pub integrator: Integrator,
    pub grid: GridSpec,
    /// Weight e^{ε₀tD^γ} of the Gevrey diagnostic.
    pub gevrey_epsilon0: f64,
    /// Cutoff index of a Galerkin truncated run.
    #[serde(default)]
    pub galerkin_n: Option<i32>,
    /// Split frequency for the high-block Besov diagnostic.
    #[serde(default)]
    pub j0: Option<i32>,
    /// Transport term on or off; off gives the pure linear flow.
    #[serde(default = "yes")]
    pub nonlinear: bool,
    /// Integrability exponents of the Besov diagnostic.
    #[serde(default = "two")]
    pub besov_p: f64,
    #[serde(default = "two")]
    pub besov_q: f64,
    /// Full diagnostics every this many steps; the first and last step are always sampled.
    #[serde(default = "ten")]
    pub output_every: usize,
    /// Keep the state every this many steps (for mild residuals).
    #[serde(default)]
    pub store_every: Option<usize>,
}

impl SolverConfig {
    pub fn new(grid: GridSpec, nu: f64, gamma: f64, dt: f64, t_final: f64) -> Self {
        Self {
            nu,
            gamma,
            dt,
            t_final,
            integrator: Integrator::IfRk4,
            grid,
            gevrey_epsilon0: 0.5,
            galerkin_n: None,
            j0: None,
            nonlinear: true,
            besov_p: 2.0,
            besov_q: 2.0,
            output_every: 10,
            store_every: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return Err(SqgError::param(format!("nu must be finite and >= 0, got {}", self.nu)));
        }
        if !(self.gamma > 0.0 && self.gamma <= 2.0) {
            return Err(SqgError::param(format!("gamma must lie in (0,2], got {}", self.gamma)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SqgError::param(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(SqgError::param(format!(
                "t_final must be positive, got {}",
                self.t_final
            )));
        }
        if !(self.gevrey_epsilon0 > 0.0 && self.gevrey_epsilon0 <= 1.0) {
            return Err(SqgError::param(format!(
                "gevrey_epsilon0 must lie in (0,1], got {}",
                self.gevrey_epsilon0
            )));
        }
        if !(self.besov_p >= 1.0 && self.besov_q >= 1.0) {
            return Err(SqgError::param("Besov exponents must be >= 1"));
        }
        if self.output_every == 0 || self.store_every == Some(0) {
            return Err(SqgError::param("output cadence must be positive"));
        }
        Ok(())
    }

    /// Step sizes covering [0, t_final]: full steps of dt, then a shorter last
    /// step when t_final is not a multiple of dt (up to relative 1e-9).
    pub fn step_plan(&self) -> (u64, Option<f64>) {
        let ratio = self.t_final / self.dt;
        let full = (ratio + 1e-9).floor();
        let rest = self.t_final - full * self.dt;
        if rest > 1e-9 * self.t_final {
            (full as u64, Some(rest))
        } else {
            (full as u64, None)
        }
    }

    pub fn total_steps(&self) -> u64 {
        let (n, rest) = self.step_plan();
        n + rest.is_some() as u64
    }
}
