use ndarray::Array2;

use super::field::SpectralField;
use super::grid::GridSpec;
use crate::error::{Result, SqgError};

/// Relative size of the mean above which negative-order homogeneous norms refuse.
const MEAN_TOL: f64 = 1e-12;

/// Ḣ^r or H^r norm from coefficients.
///
/// Homogeneous weights are |k|^{2r} (with |0|^0 = 1), inhomogeneous weights
/// (1 + |k|²)^r.
pub fn sobolev_norm(field: &SpectralField, r: f64, homogeneous: bool) -> Result<f64> {
    if homogeneous && r < 0.0 {
        let m = field.mean().abs();
        if m > MEAN_TOL * field.coeff_norm().max(f64::MIN_POSITIVE) {
            return Err(SqgError::NonzeroMean {
                mean: m,
                context: "negative-order homogeneous norm",
            });
        }
    }
    Ok(sobolev_norm_unchecked(field, r, homogeneous))
}

pub(crate) fn sobolev_norm_unchecked(field: &SpectralField, r: f64, homogeneous: bool) -> f64 {
    let grid = field.grid();
    let k = grid.wavenumbers();
    let mut acc = 0.0;
    for ((i1, i2), c) in field.coeffs().indexed_iter() {
        let a = c.norm_sqr();
        if a == 0.0 {
            continue;
        }
        let k2 = k[i1] * k[i1] + k[i2] * k[i2];
        let w = if homogeneous {
            if k2 == 0.0 {
                if r == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                k2.powf(r)
            }
        } else {
            (1.0 + k2).powf(r)
        };
        acc += w * a;
    }
    acc.sqrt() * grid.period()
}

/// ‖f‖_p with uniform-cell quadrature of weight `cell`; p = ∞ gives max |f|.
pub fn lp_norm_values(values: &[f64], cell: f64, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(SqgError::param(format!("L^p norm needs p >= 1, got {p}")));
    }
    let m = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if p.is_infinite() || m == 0.0 {
        return Ok(m);
    }
    let s: f64 = if p == 2.0 {
        values.iter().map(|v| (v / m) * (v / m)).sum()
    } else if p == 1.0 {
        values.iter().map(|v| v.abs() / m).sum()
    } else {
        values.iter().map(|v| (v.abs() / m).powf(p)).sum()
    };
    Ok(m * (cell * s).powf(1.0 / p))
}

/// ‖f‖_{L^p(T²)} of grid samples.
pub fn lp_norm(samples: &Array2<f64>, grid: &GridSpec, p: f64) -> Result<f64> {
    let n = grid.n();
    if samples.dim() != (n, n) {
        return Err(SqgError::DimensionMismatch {
            expected: format!("{n}x{n}"),
            got: format!("{:?}", samples.dim()),
        });
    }
    let v = samples.as_standard_layout();
    lp_norm_values(v.as_slice().expect("contiguous"), grid.cell_area(), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::field::{forward_transform, inverse_transform, sample};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn constant_lp() {
        let g = GridSpec::square(16).unwrap();
        let s = Array2::from_elem((16, 16), 3.0);
        for p in [1.0, 2.0, 3.5] {
            let v = lp_norm(&s, &g, p).unwrap();
            assert!((v - 3.0 * (2.0 * PI).powf(2.0 / p)).abs() < 1e-12 * v);
        }
        assert_eq!(lp_norm(&s, &g, f64::INFINITY).unwrap(), 3.0);
        assert!(lp_norm(&s, &g, 0.5).is_err());
    }

    #[test]
    fn cosine_lp() {
        let g = GridSpec::square(32).unwrap();
        let s = sample(&g, |x, _| x.cos());
        assert!((lp_norm(&s, &g, f64::INFINITY).unwrap() - 1.0).abs() < 1e-15);
        let l2 = lp_norm(&s, &g, 2.0).unwrap();
        assert!((l2 * l2 - 0.5 * (2.0 * PI).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn sobolev_pure_mode() {
        let g = GridSpec::square(32).unwrap();
        let f = SpectralField::cosine_mode(g, 3, 4, 1.0);
        let l2 = f.l2_norm();
        for r in [-0.5, 0.0, 0.5, 1.7] {
            let v = sobolev_norm(&f, r, true).unwrap();
            assert!((v - 5f64.powf(r) * l2).abs() < 1e-12 * v);
        }
        assert!((sobolev_norm(&f, 0.0, false).unwrap() - l2).abs() < 1e-14);
        let inh = sobolev_norm(&f, 1.0, false).unwrap();
        assert!((inh - 26f64.sqrt() * l2).abs() < 1e-12);
    }

    #[test]
    fn hminus_half_two_modes() {
        let g = GridSpec::square(32).unwrap();
        let mut f = SpectralField::cosine_mode(g, 1, 0, 2.0);
        f.add_real_mode(0, 3, Complex64::new(0.0, -1.0));
        // 2cos(x) + sin(3y): |c|² = 1,1 at |k|=1 and ¼,¼ at |k|=3
        let expect = 2.0 * PI * (2.0 * 1.0 + 2.0 * 0.25 / 3.0f64).sqrt();
        assert!((sobolev_norm(&f, -0.5, true).unwrap() - expect).abs() < 1e-13);
    }

    #[test]
    fn negative_order_needs_mean_free() {
        let g = GridSpec::square(16).unwrap();
        let f = SpectralField::cosine_mode(g, 0, 0, 1.0);
        assert!(sobolev_norm(&f, -0.5, true).is_err());
        assert!(sobolev_norm(&f, -0.5, false).is_ok());
    }

    #[test]
    fn plancherel() {
        let g = GridSpec::square(64).unwrap();
        let s = sample(&g, |x, y| (x + y).sin().exp() * (2.0 * y).cos());
        let f = forward_transform(&s, &g).unwrap();
        let phys = lp_norm(&s, &g, 2.0).unwrap();
        assert!((phys - f.l2_norm()).abs() < 1e-12 * phys);
        let back = inverse_transform(&f).unwrap();
        assert!((lp_norm(&back, &g, 2.0).unwrap() - phys).abs() < 1e-12 * phys);
    }
}
