//! Versioned TOML run configuration.
//!
//! ```toml
//! version = 1
//! seed = 7
//!
//! [solver]
//! grid = 128
//! gamma = 0.5
//! dt = 1e-3
//! t_final = 0.1
//!
//! [initial]
//! kind = "power_law"
//! slope = 3.0
//! normalize = 1.5
//!
//! [iterate]
//! ns = [3, 4, 5, 6]
//! ```
//!
//! Every key is optional except `version`. Command-line flags override file
//! values, which override the defaults below.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sqg_core::initial::{normalize_sobolev, PowerLaw};
use sqg_core::solver::{Integrator, SolverConfig, DEFAULT_S0};
use sqg_core::spectral::io::read_field;
use sqg_core::{GridSpec, SpectralField};

use crate::failure::Failure;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(default)]
    pub iterate: IterateSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub grid: usize,
    pub period: f64,
    pub dealias_fraction: f64,
    pub nu: f64,
    pub gamma: f64,
    pub dt: f64,
    pub t_final: f64,
    pub integrator: Integrator,
    pub gevrey_epsilon0: f64,
    pub galerkin_n: Option<i32>,
    pub j0: Option<i32>,
    pub nonlinear: bool,
    pub besov_p: f64,
    pub besov_q: f64,
    pub output_every: usize,
    pub store_every: Option<usize>,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            grid: 128,
            period: std::f64::consts::TAU,
            dealias_fraction: 2.0 / 3.0,
            nu: 1.0,
            gamma: 0.5,
            dt: 1e-3,
            t_final: 0.1,
            integrator: Integrator::IfRk4,
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
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    PowerLaw(PowerLawData),
    Mode(ModeData),
    File(FileData),
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData::PowerLaw(PowerLawData::default())
    }
}

/// Seeded random data with |θ̂(k)| ∝ |k|^{-slope} on k_min ≤ |k| ≤ k_max.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerLawData {
    pub slope: f64,
    pub k_min: f64,
    /// Absent means the dealias radius.
    pub k_max: Option<f64>,
    /// Rescale to unit H^r norm for this r.
    pub normalize: Option<f64>,
    pub homogeneous: bool,
    /// Multiplies the data after normalization.
    pub amplitude: f64,
}

impl Default for PowerLawData {
    fn default() -> Self {
        Self {
            slope: 3.0,
            k_min: 1.0,
            k_max: None,
            normalize: None,
            homogeneous: false,
            amplitude: 1.0,
        }
    }
}

/// amplitude·cos(m·x), or sin with `sine = true`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModeData {
    pub m1: i64,
    pub m2: i64,
    pub amplitude: f64,
    pub sine: bool,
}

impl Default for ModeData {
    fn default() -> Self {
        Self {
            m1: 1,
            m2: 0,
            amplitude: 1.0,
            sine: false,
        }
    }
}

/// A stored `.sqgf` field; relative paths resolve against the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileData {
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IterateSection {
    /// Absent means every admissible index for the grid.
    pub ns: Option<Vec<i32>>,
    pub p: f64,
    pub q: f64,
    pub s0: f64,
}

impl Default for IterateSection {
    fn default() -> Self {
        Self {
            ns: None,
            p: 2.0,
            q: 2.0,
            s0: DEFAULT_S0,
        }
    }
}

/// Flag values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub grid: Option<usize>,
    pub gamma: Option<f64>,
    pub nu: Option<f64>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub integrator: Option<Integrator>,
    pub epsilon0: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            seed: 0,
            solver: SolverSection::default(),
            initial: InitialData::default(),
            iterate: IterateSection::default(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Failure::Usage(format!("config: {e}")))?;
        if cfg.version != CONFIG_VERSION {
            return Err(Failure::Usage(format!(
                "config: unsupported version {}, expected {CONFIG_VERSION}",
                cfg.version
            )));
        }
        Ok(cfg)
    }

    /// Reads `path`, resolving a relative initial-data file against its directory.
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        if let InitialData::File(f) = &mut cfg.initial {
            if f.path.is_relative() {
                if let Some(dir) = path.parent() {
                    f.path = dir.join(&f.path);
                }
            }
        }
        Ok(cfg)
    }

    pub fn load_or_default(path: Option<&Path>) -> Result<Self, Failure> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn apply(&mut self, o: &Overrides) {
        let s = &mut self.solver;
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.grid {
            s.grid = v;
        }
        if let Some(v) = o.gamma {
            s.gamma = v;
        }
        if let Some(v) = o.nu {
            s.nu = v;
        }
        if let Some(v) = o.dt {
            s.dt = v;
        }
        if let Some(v) = o.t_final {
            s.t_final = v;
        }
        if let Some(v) = o.integrator {
            s.integrator = v;
        }
        if let Some(v) = o.epsilon0 {
            s.gevrey_epsilon0 = v;
        }
    }

    pub fn grid(&self) -> Result<GridSpec, Failure> {
        let s = &self.solver;
        Ok(GridSpec::new(s.grid, s.period, s.dealias_fraction)?)
    }

    /// The validated solver configuration.
    pub fn solver_config(&self) -> Result<SolverConfig, Failure> {
        let s = &self.solver;
        let cfg = SolverConfig {
            integrator: s.integrator,
            gevrey_epsilon0: s.gevrey_epsilon0,
            galerkin_n: s.galerkin_n,
            j0: s.j0,
            nonlinear: s.nonlinear,
            besov_p: s.besov_p,
            besov_q: s.besov_q,
            output_every: s.output_every,
            store_every: s.store_every,
            ..SolverConfig::new(self.grid()?, s.nu, s.gamma, s.dt, s.t_final)
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn initial_field(&self) -> Result<SpectralField, Failure> {
        let grid = self.grid()?;
        match &self.initial {
            InitialData::PowerLaw(d) => {
                let raw = PowerLaw::new(d.slope, d.k_min, d.k_max.unwrap_or(f64::INFINITY)).sample(grid, self.seed);
                let f = match d.normalize {
                    Some(r) => normalize_sobolev(&raw, r, d.homogeneous)?,
                    None => raw,
                };
                Ok(f.scaled(d.amplitude))
            }
            InitialData::Mode(d) => Ok(if d.sine {
                SpectralField::sine_mode(grid, d.m1, d.m2, d.amplitude)
            } else {
                SpectralField::cosine_mode(grid, d.m1, d.m2, d.amplitude)
            }),
            InitialData::File(d) => {
                let file = fs::File::open(&d.path)
                    .map_err(|e| Failure::Usage(format!("initial data {}: {e}", d.path.display())))?;
                let f = read_field(std::io::BufReader::new(file))?;
                if f.grid() != &grid {
                    return Err(Failure::Usage(format!(
                        "initial data {} is on a {}² grid, config asks for {}²",
                        d.path.display(),
                        f.grid().n(),
                        grid.n()
                    )));
                }
                Ok(f)
            }
        }
    }
}
