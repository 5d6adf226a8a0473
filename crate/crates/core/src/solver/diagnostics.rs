//! Norms tracked along a run.

use std::io::Write;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::SolverConfig;
use crate::error::Result;
use crate::littlewood_paley::{besov_norm, block_lp_norms, project_high, DyadicPartition};
use crate::spectral::{apply_multiplier, inverse_transform, lp_norm, GridSpec, MultiplierSpec, SpectralField};

/// Cheap per-step quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    pub t: f64,
    pub l2: f64,
    pub linf: f64,
    pub hminus_half: f64,
    /// ‖D^{γ/2}θ‖₂²
    pub dissipation: f64,
    pub mean: f64,
    pub courant: f64,
}

/// Full diagnostics at an output time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSample {
    pub step: u64,
    pub t: f64,
    pub l1: f64,
    pub l2: f64,
    pub l4: f64,
    pub linf: f64,
    pub hminus_half: f64,
    /// ‖θ‖_{H^{2-γ}}
    pub h_s: f64,
    /// ‖e^{ε₀tD^γ}θ‖_{H^{2-γ}}
    pub gevrey_h_s: f64,
    /// ∫₀^t ‖e^{ε₀τD^γ}θ‖²_{H^{2-γ/2}} dτ, trapezoid over steps.
    pub dissipation_integral: f64,
    /// ‖e^{½tD^γ}θ‖_{B^{1-γ+2/p}_{p,q}}
    pub besov: f64,
    /// The same Besov norm of P_{>J₀} of the weighted field.
    pub besov_tail: Option<f64>,
    /// ‖P_jθ‖_p for the series' block indices.
    pub blocks: Vec<f64>,
}

/// Per-grid tables and the configured exponents.
#[derive(Debug, Clone)]
pub(crate) struct Diagnostics {
    pub grid: GridSpec,
    gamma: f64,
    eps0: f64,
    p: f64,
    q: f64,
    j0: Option<i32>,
    pub block_js: Vec<i32>,
    /// |k|^γ per mode, row-major
    kgamma: Vec<f64>,
    /// 1 + |k|² per mode
    one_plus_k2: Vec<f64>,
}

impl Diagnostics {
    pub fn new(config: &SolverConfig) -> Self {
        let grid = config.grid;
        let k = grid.wavenumbers();
        let mut kgamma = Vec::with_capacity(grid.len());
        let mut one_plus_k2 = Vec::with_capacity(grid.len());
        for &a in &k {
            for &b in &k {
                let r2 = a * a + b * b;
                kgamma.push(r2.sqrt().powf(config.gamma));
                one_plus_k2.push(1.0 + r2);
            }
        }
        let part = DyadicPartition::for_grid(&grid);
        Self {
            grid,
            gamma: config.gamma,
            eps0: config.gevrey_epsilon0,
            p: config.besov_p,
            q: config.besov_q,
            j0: config.j0,
            block_js: (part.j_low + 1..=part.verified_j_max).collect(),
            kgamma,
            one_plus_k2,
        }
    }

    /// (Σ w_k |c_k|²)^{1/2}·L with log w_k = `log_weight(index)`, summed in
    /// log space so Gevrey weights near the cap do not overflow.
    fn weighted(&self, f: &SpectralField, log_weight: impl Fn(usize) -> f64) -> f64 {
        let mut terms = Vec::new();
        for (i, c) in f.as_slice().iter().enumerate() {
            let a = c.norm_sqr();
            if a > 0.0 {
                terms.push(a.ln() + log_weight(i));
            }
        }
        let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return 0.0;
        }
        let s: f64 = terms.iter().map(|l| (l - m).exp()).sum();
        (0.5 * (m + s.ln())).exp() * self.grid.period()
    }

    /// ‖e^{λtD^γ}θ‖_{H^r}
    pub fn gevrey_sobolev(&self, f: &SpectralField, lambda: f64, t: f64, r: f64) -> f64 {
        self.weighted(f, |i| 2.0 * lambda * t * self.kgamma[i] + r * self.one_plus_k2[i].ln())
    }

    /// ‖D^{γ/2}θ‖₂²
    pub fn dissipation(&self, f: &SpectralField) -> f64 {
        let s: f64 = f
            .as_slice()
            .iter()
            .zip(&self.kgamma)
            .map(|(c, w)| w * c.norm_sqr())
            .sum();
        s * self.grid.period() * self.grid.period()
    }

    /// ‖θ‖_{Ḣ^{-1/2}}; the mean is excluded.
    pub fn hminus_half(&self, f: &SpectralField) -> f64 {
        let s: f64 = f
            .as_slice()
            .iter()
            .zip(&self.one_plus_k2)
            .filter(|(_, w)| **w > 1.0)
            .map(|(c, w)| c.norm_sqr() / (w - 1.0).sqrt())
            .sum();
        s.sqrt() * self.grid.period()
    }

    /// Integrand of the time-integrated Gevrey dissipation at time t.
    pub fn gevrey_dissipation(&self, f: &SpectralField, t: f64) -> f64 {
        self.gevrey_sobolev(f, self.eps0, t, 2.0 - 0.5 * self.gamma).powi(2)
    }

    pub fn step_record(&self, f: &SpectralField, step: u64, t: f64, courant: f64) -> Result<StepRecord> {
        let phys = inverse_transform(f)?;
        Ok(StepRecord {
            step,
            t,
            l2: f.l2_norm(),
            linf: sup_norm(f, &phys),
            hminus_half: self.hminus_half(f),
            dissipation: self.dissipation(f),
            mean: f.mean(),
            courant,
        })
    }

    pub fn sample(&self, f: &SpectralField, step: u64, t: f64, dissipation_integral: f64) -> Result<TimeSample> {
        let phys = inverse_transform(f)?;
        let s = 2.0 - self.gamma;
        let weighted = apply_multiplier(f, &MultiplierSpec::gevrey(0.5, t, self.gamma))?;
        let besov_s = 1.0 - self.gamma + 2.0 / self.p;
        let besov_tail = match self.j0 {
            Some(j0) => Some(besov_norm(&project_high(&weighted, j0), besov_s, self.p, self.q)?),
            None => None,
        };
        Ok(TimeSample {
            step,
            t,
            l1: lp_norm(&phys, &self.grid, 1.0)?,
            l2: lp_norm(&phys, &self.grid, 2.0)?,
            l4: lp_norm(&phys, &self.grid, 4.0)?,
            linf: sup_norm(f, &phys),
            hminus_half: self.hminus_half(f),
            h_s: self.gevrey_sobolev(f, 0.0, 0.0, s),
            gevrey_h_s: self.gevrey_sobolev(f, self.eps0, t, s),
            dissipation_integral,
            besov: besov_norm(&weighted, besov_s, self.p, self.q)?,
            besov_tail,
            blocks: block_lp_norms(f, &self.block_js, self.p)?,
        })
    }
}

pub(crate) fn write_samples_csv<W: Write>(samples: &[TimeSample], block_js: &[i32], mut w: W) -> Result<()> {
    write!(
        w,
        "step,t,l1,l2,l4,linf,hminus_half,h_s,gevrey_h_s,dissipation_integral,besov,besov_tail"
    )?;
    for j in block_js {
        write!(w, ",block_{j}")?;
    }
    writeln!(w)?;
    for s in samples {
        write!(
            w,
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},",
            s.step, s.t, s.l1, s.l2, s.l4, s.linf, s.hminus_half, s.h_s, s.gevrey_h_s, s.dissipation_integral, s.besov
        )?;
        if let Some(v) = s.besov_tail {
            write!(w, "{v:e}")?;
        }
        for b in &s.blocks {
            write!(w, ",{b:e}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Trigonometric polynomial with its first and second derivatives at a point.
struct Interpolant {
    period: f64,
    k: Vec<f64>,
    /// nonzero modes as (storage index 1, storage index 2, coefficient)
    modes: Vec<(usize, usize, Complex64)>,
}

impl Interpolant {
    fn new(f: &SpectralField, sign: f64) -> Self {
        let g = f.grid();
        let modes = f
            .coeffs()
            .indexed_iter()
            .filter(|(_, c)| **c != Complex64::default())
            .map(|((i1, i2), &c)| (i1, i2, c * sign))
            .collect();
        Self {
            period: g.period(),
            k: g.wavenumbers(),
            modes,
        }
    }

    /// Value, gradient and Hessian (h11, h12, h22) at (x, y); x is axis 0.
    fn eval(&self, x: f64, y: f64) -> (f64, [f64; 2], [f64; 3]) {
        let ex: Vec<Complex64> = self.k.iter().map(|&k| Complex64::from_polar(1.0, k * x)).collect();
        let ey: Vec<Complex64> = self.k.iter().map(|&k| Complex64::from_polar(1.0, k * y)).collect();
        let (mut v, mut g, mut h) = (0.0, [0.0; 2], [0.0; 3]);
        for &(i1, i2, c) in &self.modes {
            let z = c * ex[i1] * ey[i2];
            let (k1, k2) = (self.k[i1], self.k[i2]);
            // d/dx e^{ik·x} = ik₁e^{ik·x}; real part of i·z is -z.im
            v += z.re;
            g[0] -= k1 * z.im;
            g[1] -= k2 * z.im;
            h[0] -= k1 * k1 * z.re;
            h[1] -= k1 * k2 * z.re;
            h[2] -= k2 * k2 * z.re;
        }
        (v, g, h)
    }

    /// Newton ascent from (x, y), confined to one grid cell around the start.
    fn refine_max(&self, x0: f64, y0: f64, cell: f64) -> f64 {
        let (mut x, mut y) = (x0, y0);
        let (mut v, mut g, mut h) = self.eval(x, y);
        for _ in 0..12 {
            let det = h[0] * h[2] - h[1] * h[1];
            if !(h[0] < 0.0 && det > 0.0) {
                break;
            }
            let dx = -(h[2] * g[0] - h[1] * g[1]) / det;
            let dy = -(h[0] * g[1] - h[1] * g[0]) / det;
            let (nx, ny) = (x + dx, y + dy);
            if (nx - x0).abs() > cell || (ny - y0).abs() > cell {
                break;
            }
            let (nv, ng, nh) = self.eval(nx, ny);
            if nv < v {
                break;
            }
            let small = dx.abs().max(dy.abs()) < 1e-12 * self.period;
            (x, y, v, g, h) = (nx, ny, nv, ng, nh);
            if small {
                break;
            }
        }
        v
    }
}

/// Grid points that dominate their eight neighbours, largest first.
fn local_maxima(values: &Array2<f64>, sign: f64, keep: usize) -> Vec<(usize, usize, f64)> {
    let n = values.nrows();
    let at = |i: usize, j: usize| sign * values[[i % n, j % n]];
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = at(i, j);
            let mut top = true;
            'nb: for di in [n - 1, 0, 1] {
                for dj in [n - 1, 0, 1] {
                    if (di, dj) != (0, 0) && at(i + di, j + dj) > v {
                        top = false;
                        break 'nb;
                    }
                }
            }
            if top {
                out.push((i, j, v));
            }
        }
    }
    out.sort_by(|a, b| b.2.total_cmp(&a.2));
    out.truncate(keep);
    out
}

/// sup|θ| of the trigonometric interpolant: grid maximum refined by Newton
/// steps from the four largest local extrema of each sign.
pub fn sup_norm(f: &SpectralField, phys: &Array2<f64>) -> f64 {
    let grid_max = phys.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if grid_max == 0.0 {
        return 0.0;
    }
    let g = f.grid();
    let h = g.spacing();
    let pos = Interpolant::new(f, 1.0);
    let neg = Interpolant::new(f, -1.0);
    let mut best = grid_max;
    for (sign, interp) in [(1.0, &pos), (-1.0, &neg)] {
        for (i, j, _) in local_maxima(phys, sign, 4) {
            best = best.max(interp.refine_max(g.coordinate(i), g.coordinate(j), h));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::PowerLaw;

    #[test]
    fn sup_norm_finds_off_grid_peak() {
        let g = GridSpec::square(32).unwrap();
        // peak of cos(x - a) sits between grid points
        let mut f = SpectralField::zeros(g);
        f.add_real_mode(1, 0, Complex64::from_polar(1.0, -0.05));
        f.add_real_mode(0, 3, Complex64::from_polar(0.5, 0.3));
        let phys = inverse_transform(&f).unwrap();
        let grid_max = phys.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let s = sup_norm(&f, &phys);
        assert!((s - 1.5).abs() < 1e-12, "{s}");
        assert!(grid_max < 1.5 - 1e-4);
    }

    #[test]
    fn weighted_norms() {
        let g = GridSpec::square(32).unwrap();
        let cfg = SolverConfig::new(g, 1.0, 0.5, 0.01, 1.0);
        let d = Diagnostics::new(&cfg);
        let f = SpectralField::cosine_mode(g, 3, 4, 1.0);
        let l = g.period();
        // two coefficients of 1/2
        let base = l * (0.5f64).sqrt();
        assert!((d.gevrey_sobolev(&f, 0.0, 0.0, 0.0) - base).abs() < 1e-12);
        let w = (0.7 * 2.0 * 5f64.sqrt()).exp() * 26f64.powf(0.75);
        assert!((d.gevrey_sobolev(&f, 0.7, 2.0, 1.5) / (base * w) - 1.0).abs() < 1e-12);
        assert!((d.hminus_half(&f) - base / 5f64.sqrt()).abs() < 1e-12);
        assert!((d.dissipation(&f) - base * base * 5f64.sqrt()).abs() < 1e-10);
        // huge weights stay finite
        assert!(d.gevrey_sobolev(&f, 1.0, 200.0, 1.0).is_finite());
    }

    #[test]
    fn sample_l2_agrees_with_plancherel() {
        let g = GridSpec::square(64).unwrap();
        let f = PowerLaw::new(2.0, 1.0, 15.0).sample(g, 2);
        let cfg = SolverConfig::new(g, 1.0, 0.5, 0.01, 1.0);
        let d = Diagnostics::new(&cfg);
        let s = d.sample(&f, 0, 0.0, 0.0).unwrap();
        assert!((s.l2 - f.l2_norm()).abs() < 1e-12 * s.l2);
        assert!(s.linf >= s.l2 / g.period());
        assert_eq!(s.blocks.len(), d.block_js.len());
        let mut out = Vec::new();
        write_samples_csv(&[s], &d.block_js, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let cols = text.lines().next().unwrap().split(',').count();
        assert_eq!(text.lines().nth(1).unwrap().split(',').count(), cols);
    }
}
