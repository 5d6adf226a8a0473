//! Exponential integrators for systems θ' = Lθ + N(θ) with diagonal
//! L = -ν|k|^γ. A system is a slice of fields sharing one grid; N sees the
//! whole slice so coupled iterations step in lockstep.

use num_complex::Complex64;

use super::config::Integrator;
use crate::error::{Result, SqgError};
use crate::spectral::{GridSpec, SpectralField};

/// e^z - 1 over z and (e^z - 1 - z) over z², by series near 0.
fn phi_functions(z: f64) -> (f64, f64) {
    if z.abs() < 0.1 {
        let (mut p1, mut p2) = (0.0, 0.0);
        let mut term = 1.0;
        for k in 0..10 {
            // term = z^k / (k+1)!
            term = if k == 0 { 1.0 } else { term * z / (k + 1) as f64 };
            p1 += term;
            p2 += term / (k + 2) as f64;
        }
        (p1, p2)
    } else {
        let e = z.exp_m1();
        (e / z, (e - z) / (z * z))
    }
}

/// One step of size `h` with precomputed mode weights.
#[derive(Debug, Clone)]
pub struct Stepper {
    pub integrator: Integrator,
    pub h: f64,
    e_full: Vec<f64>,
    e_half: Vec<f64>,
    phi1: Vec<f64>,
    phi2: Vec<f64>,
}

impl Stepper {
    pub fn new(grid: &GridSpec, nu: f64, gamma: f64, h: f64, integrator: Integrator) -> Self {
        let n = grid.n();
        let k = grid.wavenumbers();
        let mut rates = Vec::with_capacity(n * n);
        for &a in &k {
            for &b in &k {
                rates.push(-nu * a.hypot(b).powf(gamma));
            }
        }
        let e_full = rates.iter().map(|l| (l * h).exp()).collect();
        let e_half = rates.iter().map(|l| (0.5 * l * h).exp()).collect();
        let (phi1, phi2) = if integrator == Integrator::EtdRk2 {
            rates.iter().map(|l| phi_functions(l * h)).unzip()
        } else {
            (Vec::new(), Vec::new())
        };
        Self {
            integrator,
            h,
            e_full,
            e_half,
            phi1,
            phi2,
        }
    }

    /// Advances every field of `state` by h.
    pub fn advance<F>(&self, state: &[SpectralField], rhs: F) -> Result<Vec<SpectralField>>
    where
        F: Fn(&[SpectralField]) -> Result<Vec<SpectralField>>,
    {
        let out = match self.integrator {
            Integrator::IfRk4 => self.if_rk4(state, &rhs)?,
            Integrator::EtdRk2 => self.etd_rk2(state, &rhs)?,
        };
        if out.iter().any(|f| !f.is_finite()) {
            return Err(SqgError::NonFinite { t: f64::NAN });
        }
        Ok(out)
    }

    fn if_rk4<F>(&self, y: &[SpectralField], rhs: &F) -> Result<Vec<SpectralField>>
    where
        F: Fn(&[SpectralField]) -> Result<Vec<SpectralField>>,
    {
        let h = self.h;
        let (ef, eh) = (&self.e_full, &self.e_half);
        let k1 = checked(rhs(y)?, y)?;
        let a = combine(&[y, &k1], |i, v| eh[i] * (v[0] + v[1] * (0.5 * h)));
        let k2 = checked(rhs(&a)?, y)?;
        let b = combine(&[y, &k2], |i, v| eh[i] * v[0] + v[1] * (0.5 * h));
        let k3 = checked(rhs(&b)?, y)?;
        let c = combine(&[y, &k3], |i, v| ef[i] * v[0] + eh[i] * h * v[1]);
        let k4 = checked(rhs(&c)?, y)?;
        Ok(combine(&[y, &k1, &k2, &k3, &k4], |i, v| {
            ef[i] * v[0] + (h / 6.0) * (ef[i] * v[1] + 2.0 * eh[i] * (v[2] + v[3]) + v[4])
        }))
    }

    fn etd_rk2<F>(&self, y: &[SpectralField], rhs: &F) -> Result<Vec<SpectralField>>
    where
        F: Fn(&[SpectralField]) -> Result<Vec<SpectralField>>,
    {
        let h = self.h;
        let (ef, p1, p2) = (&self.e_full, &self.phi1, &self.phi2);
        let k1 = checked(rhs(y)?, y)?;
        let a = combine(&[y, &k1], |i, v| ef[i] * v[0] + h * p1[i] * v[1]);
        let k2 = checked(rhs(&a)?, y)?;
        Ok(combine(&[&a, &k1, &k2], |i, v| v[0] + h * p2[i] * (v[2] - v[1])))
    }
}

fn checked(k: Vec<SpectralField>, y: &[SpectralField]) -> Result<Vec<SpectralField>> {
    if k.len() != y.len() {
        return Err(SqgError::DimensionMismatch {
            expected: format!("{} right-hand sides", y.len()),
            got: k.len().to_string(),
        });
    }
    for (a, b) in k.iter().zip(y) {
        a.check_grid(b)?;
    }
    Ok(k)
}

/// Mode-wise combination of up to five systems of equal shape.
fn combine(inputs: &[&[SpectralField]], f: impl Fn(usize, &[Complex64; 5]) -> Complex64) -> Vec<SpectralField> {
    let m = inputs[0].len();
    (0..m)
        .map(|c| {
            let mut out = inputs[0][c].clone();
            let slices: Vec<&[Complex64]> = inputs.iter().map(|s| s[c].as_slice()).collect();
            let mut v = [Complex64::default(); 5];
            for (i, o) in out.as_slice_mut().iter_mut().enumerate() {
                for (slot, s) in v.iter_mut().zip(&slices) {
                    *slot = s[i];
                }
                *o = f(i, &v);
            }
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_functions_match_direct() {
        for z in [-3.0, -0.5, -0.099, -1e-6, 0.0, 0.05] {
            let (p1, p2) = phi_functions(z);
            if z != 0.0 {
                let e = f64::exp(z) - 1.0;
                assert!((p1 - e / z).abs() < 1e-9, "{z}");
                if z.abs() > 1e-3 {
                    assert!((p2 - (e - z) / (z * z)).abs() < 1e-8, "{z}");
                }
            } else {
                assert_eq!((p1, p2), (1.0, 0.5));
            }
        }
    }

    #[test]
    fn linear_flow_exact_per_mode() {
        let g = GridSpec::square(32).unwrap();
        let f = SpectralField::cosine_mode(g, 3, 4, 1.0);
        for integ in [Integrator::IfRk4, Integrator::EtdRk2] {
            let s = Stepper::new(&g, 1.0, 0.5, 0.1, integ);
            let zero = |y: &[SpectralField]| Ok(y.iter().map(|f| SpectralField::zeros(*f.grid())).collect());
            let mut y = vec![f.clone()];
            for _ in 0..10 {
                y = s.advance(&y, zero).unwrap();
            }
            let want = (-(5f64).sqrt()).exp() * 0.5;
            assert!((y[0].mode(3, 4).re - want).abs() < 1e-15);
        }
    }

    #[test]
    fn scalar_ode_orders() {
        // θ' = -θ + θ² on the mean mode (L = 0 there), exact θ = 1/(1 + (1/θ₀ - 1)e^t)
        let g = GridSpec::square(8).unwrap();
        let rhs = |y: &[SpectralField]| {
            let c = y[0].mode(0, 0).re;
            Ok(vec![SpectralField::cosine_mode(*y[0].grid(), 0, 0, -c + c * c)])
        };
        let exact = 1.0 / (1.0 + (1.0 / 0.5 - 1.0) * 1f64.exp());
        for (integ, order) in [(Integrator::IfRk4, 4.0), (Integrator::EtdRk2, 2.0)] {
            let err = |steps: u32| {
                let s = Stepper::new(&g, 1.0, 0.5, 1.0 / steps as f64, integ);
                let mut y = vec![SpectralField::cosine_mode(g, 0, 0, 0.5)];
                for _ in 0..steps {
                    y = s.advance(&y, rhs).unwrap();
                }
                (y[0].mode(0, 0).re - exact).abs()
            };
            let observed = (err(20) / err(40)).log2();
            assert!((observed - order).abs() < 0.2, "{integ:?}: {observed}");
        }
    }
}
