use ndarray::Array2;
use num_complex::Complex64;

use super::fft::fft2;
use super::grid::GridSpec;
use crate::error::{Result, SqgError};

/// Relative imaginary residue tolerated by [`inverse_transform`].
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

/// Fourier coefficients of a real periodic field.
///
/// `coeffs[[i1, i2]]` is the coefficient of e^{i(k1 x1 + k2 x2)} with
/// `k1 = grid.wavenumber(i1)`, `k2 = grid.wavenumber(i2)`, normalized so
/// that `f(x) = Σ_k coeffs(k) e^{ik·x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Array2<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        let n = grid.n();
        Self {
            grid,
            coeffs: Array2::zeros((n, n)),
        }
    }

    pub fn from_coeffs(grid: GridSpec, coeffs: Array2<Complex64>) -> Result<Self> {
        let n = grid.n();
        if coeffs.dim() != (n, n) {
            return Err(SqgError::DimensionMismatch {
                expected: format!("{n}x{n}"),
                got: format!("{:?}", coeffs.dim()),
            });
        }
        Ok(Self {
            grid,
            coeffs: coeffs.as_standard_layout().into_owned(),
        })
    }

    /// Builds a field from a real symbol-like function of the physical wavenumber.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let k = grid.wavenumbers();
        let n = grid.n();
        let coeffs = Array2::from_shape_fn((n, n), |(i1, i2)| f(k[i1], k[i2]));
        Self { grid, coeffs }
    }

    /// cos(k·x) with k = (m1, m2) in lattice units.
    pub fn cosine_mode(grid: GridSpec, m1: i64, m2: i64, amplitude: f64) -> Self {
        let mut out = Self::zeros(grid);
        out.add_real_mode(m1, m2, Complex64::new(amplitude, 0.0));
        out
    }

    /// sin(k·x) with k = (m1, m2) in lattice units.
    pub fn sine_mode(grid: GridSpec, m1: i64, m2: i64, amplitude: f64) -> Self {
        let mut out = Self::zeros(grid);
        out.add_real_mode(m1, m2, Complex64::new(0.0, -amplitude));
        out
    }

    /// Adds Re(c · e^{ik·x}), keeping the field real.
    pub fn add_real_mode(&mut self, m1: i64, m2: i64, c: Complex64) {
        let i1 = self.grid.storage_index(m1);
        let i2 = self.grid.storage_index(m2);
        let j1 = self.grid.mirror(i1);
        let j2 = self.grid.mirror(i2);
        if (i1, i2) == (j1, j2) {
            self.coeffs[[i1, i2]] += Complex64::new(c.re, 0.0);
        } else {
            self.coeffs[[i1, i2]] += c * 0.5;
            self.coeffs[[j1, j2]] += c.conj() * 0.5;
        }
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn coeffs(&self) -> &Array2<Complex64> {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Array2<Complex64> {
        self.coeffs
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex64] {
        self.coeffs.as_slice().expect("standard layout")
    }

    #[inline]
    pub fn as_slice_mut(&mut self) -> &mut [Complex64] {
        self.coeffs.as_slice_mut().expect("standard layout")
    }

    /// Coefficient at signed lattice frequency (m1, m2).
    pub fn mode(&self, m1: i64, m2: i64) -> Complex64 {
        self.coeffs[[self.grid.storage_index(m1), self.grid.storage_index(m2)]]
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[[0, 0]].re
    }

    /// Spectral L² norm: period · (Σ|c_k|²)^{1/2}.
    pub fn l2_norm(&self) -> f64 {
        self.coeff_norm() * self.grid.period()
    }

    /// Euclidean norm of the coefficient array.
    pub fn coeff_norm(&self) -> f64 {
        self.as_slice().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ∫ f g dx for real fields.
    pub fn inner(&self, other: &SpectralField) -> Result<f64> {
        self.check_grid(other)?;
        let s: f64 = self
            .as_slice()
            .iter()
            .zip(other.as_slice())
            .map(|(a, b)| (a * b.conj()).re)
            .sum();
        Ok(s * self.grid.period() * self.grid.period())
    }

    /// Largest |c(k) - conj c(-k)| relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n();
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for i1 in 0..n {
            let j1 = self.grid.mirror(i1);
            for i2 in 0..n {
                let j2 = self.grid.mirror(i2);
                let d = (self.coeffs[[i1, i2]] - self.coeffs[[j1, j2]].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst / scale
    }

    pub fn max_abs(&self) -> f64 {
        self.as_slice().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest |k| carrying a coefficient with modulus above `rel_tol · max`.
    pub fn support_radius(&self, rel_tol: f64) -> f64 {
        let thresh = self.max_abs() * rel_tol;
        let k = self.grid.wavenumbers();
        let n = self.grid.n();
        let mut r: f64 = 0.0;
        for i1 in 0..n {
            for i2 in 0..n {
                if self.coeffs[[i1, i2]].norm() > thresh {
                    r = r.max(k[i1].hypot(k[i2]));
                }
            }
        }
        r
    }

    pub fn nonzero_count(&self) -> usize {
        self.as_slice().iter().filter(|c| **c != Complex64::default()).count()
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn check_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid.same_lattice(&other.grid) {
            Ok(())
        } else {
            Err(SqgError::GridMismatch)
        }
    }

    pub fn scaled(&self, a: f64) -> SpectralField {
        let mut out = self.clone();
        out.coeffs.mapv_inplace(|c| c * a);
        out
    }

    /// self + a·other
    pub fn axpy(&self, a: f64, other: &SpectralField) -> Result<SpectralField> {
        self.check_grid(other)?;
        let mut out = self.clone();
        out.coeffs.zip_mut_with(&other.coeffs, |x, y| *x += y * a);
        Ok(out)
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.axpy(-1.0, other)
    }

    /// Multiplies every coefficient by `symbol(k1, k2)`.
    pub fn map_symbol(&self, mut symbol: impl FnMut(f64, f64) -> Complex64) -> SpectralField {
        let k = self.grid.wavenumbers();
        let mut out = self.clone();
        for ((i1, i2), c) in out.coeffs.indexed_iter_mut() {
            *c *= symbol(k[i1], k[i2]);
        }
        out
    }

    /// Zeroes every mode outside the dealias disk.
    pub fn dealias_in_place(&mut self) {
        let grid = self.grid;
        for ((i1, i2), c) in self.coeffs.indexed_iter_mut() {
            if !grid.keeps(i1, i2) {
                *c = Complex64::default();
            }
        }
    }

    pub fn dealiased(&self) -> SpectralField {
        let mut out = self.clone();
        out.dealias_in_place();
        out
    }

    /// Largest coefficient modulus outside the dealias disk.
    pub fn dealias_leak(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for ((i1, i2), c) in self.coeffs.indexed_iter() {
            if !self.grid.keeps(i1, i2) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }

    /// Removes the imaginary round-off that breaks exact Hermitian symmetry.
    pub fn symmetrize(&mut self) {
        let n = self.grid.n();
        let src = self.coeffs.clone();
        for i1 in 0..n {
            let j1 = self.grid.mirror(i1);
            for i2 in 0..n {
                let j2 = self.grid.mirror(i2);
                self.coeffs[[i1, i2]] = (src[[i1, i2]] + src[[j1, j2]].conj()) * 0.5;
            }
        }
    }
}

/// Physical samples → coefficients, `c_k = N^{-2} Σ_x f(x) e^{-ik·x}`.
pub fn forward_transform(samples: &Array2<f64>, grid: &GridSpec) -> Result<SpectralField> {
    let n = grid.n();
    if samples.dim() != (n, n) {
        return Err(SqgError::DimensionMismatch {
            expected: format!("{n}x{n}"),
            got: format!("{:?}", samples.dim()),
        });
    }
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft2(&mut buf, n, false);
    let scale = 1.0 / (n * n) as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    let coeffs = Array2::from_shape_vec((n, n), buf).expect("shape");
    Ok(SpectralField { grid: *grid, coeffs })
}

/// Coefficients → physical samples. Fails if the result is not real.
pub fn inverse_transform(field: &SpectralField) -> Result<Array2<f64>> {
    let n = field.grid.n();
    let mut buf = field.as_slice().to_vec();
    fft2(&mut buf, n, true);
    let mut max_re: f64 = 0.0;
    let mut max_im: f64 = 0.0;
    for c in &buf {
        max_re = max_re.max(c.re.abs());
        max_im = max_im.max(c.im.abs());
    }
    let scale = max_re.max(max_im);
    if scale > 0.0 && max_im > IMAG_RESIDUE_TOL * scale {
        return Err(SqgError::HermitianViolation {
            residue: max_im / scale,
            tolerance: IMAG_RESIDUE_TOL,
        });
    }
    let re: Vec<f64> = buf.iter().map(|c| c.re).collect();
    Ok(Array2::from_shape_vec((n, n), re).expect("shape"))
}

/// Transforms two real fields with one complex FFT.
pub fn forward_pair(a: &Array2<f64>, b: &Array2<f64>, grid: &GridSpec) -> Result<(SpectralField, SpectralField)> {
    let n = grid.n();
    if a.dim() != (n, n) || b.dim() != (n, n) {
        return Err(SqgError::DimensionMismatch {
            expected: format!("{n}x{n}"),
            got: format!("{:?} / {:?}", a.dim(), b.dim()),
        });
    }
    let mut buf: Vec<Complex64> = a.iter().zip(b.iter()).map(|(&x, &y)| Complex64::new(x, y)).collect();
    fft2(&mut buf, n, false);
    let scale = 0.5 / (n * n) as f64;
    let mut fa = Array2::<Complex64>::zeros((n, n));
    let mut fb = Array2::<Complex64>::zeros((n, n));
    for i1 in 0..n {
        let j1 = grid.mirror(i1);
        for i2 in 0..n {
            let j2 = grid.mirror(i2);
            let z = buf[i1 * n + i2];
            let zm = buf[j1 * n + j2].conj();
            fa[[i1, i2]] = (z + zm) * scale;
            let d = (z - zm) * scale;
            fb[[i1, i2]] = Complex64::new(d.im, -d.re);
        }
    }
    Ok((
        SpectralField {
            grid: *grid,
            coeffs: fa,
        },
        SpectralField {
            grid: *grid,
            coeffs: fb,
        },
    ))
}

/// Inverse of two Hermitian fields with one complex FFT. No residue check.
pub fn inverse_pair(a: &SpectralField, b: &SpectralField) -> Result<(Array2<f64>, Array2<f64>)> {
    a.check_grid(b)?;
    let n = a.grid.n();
    let mut buf: Vec<Complex64> = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x + Complex64::new(-y.im, y.re))
        .collect();
    fft2(&mut buf, n, true);
    let re = Array2::from_shape_fn((n, n), |(i, j)| buf[i * n + j].re);
    let im = Array2::from_shape_fn((n, n), |(i, j)| buf[i * n + j].im);
    Ok((re, im))
}

/// Samples of `f` on the grid.
pub fn sample(grid: &GridSpec, f: impl Fn(f64, f64) -> f64) -> Array2<f64> {
    let n = grid.n();
    Array2::from_shape_fn((n, n), |(i, j)| f(grid.coordinate(i), grid.coordinate(j)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> GridSpec {
        GridSpec::square(n).unwrap()
    }

    #[test]
    fn constant_maps_to_mean_mode() {
        let g = grid(16);
        let f = forward_transform(&Array2::from_elem((16, 16), 1.0), &g).unwrap();
        assert!((f.mode(0, 0).re - 1.0).abs() < 1e-15);
        let others: f64 = f.as_slice().iter().skip(1).map(|c| c.norm()).sum();
        assert!(others < 1e-14);
    }

    #[test]
    fn cosine_has_half_coefficients() {
        let g = grid(32);
        let s = sample(&g, |x, y| (3.0 * x - 2.0 * y).cos());
        let f = forward_transform(&s, &g).unwrap();
        assert!((f.mode(3, -2) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((f.mode(-3, 2) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        let total: f64 = f.as_slice().iter().map(|c| c.norm()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let back = inverse_transform(&f).unwrap();
        let err = (&back - &s).iter().fold(0.0f64, |a, b| a.max(b.abs()));
        assert!(err < 1e-13);
    }

    #[test]
    fn mode_builders_match_samples() {
        let g = grid(16);
        let c = inverse_transform(&SpectralField::cosine_mode(g, 2, 1, 1.5)).unwrap();
        let s = inverse_transform(&SpectralField::sine_mode(g, 2, 1, 1.5)).unwrap();
        for i in 0..16 {
            for j in 0..16 {
                let ph = 2.0 * g.coordinate(i) + g.coordinate(j);
                assert!((c[[i, j]] - 1.5 * ph.cos()).abs() < 1e-13);
                assert!((s[[i, j]] - 1.5 * ph.sin()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn zero_field_inverts_to_zero() {
        let g = grid(8);
        let z = inverse_transform(&SpectralField::zeros(g)).unwrap();
        assert!(z.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn asymmetric_coefficients_rejected() {
        let g = grid(8);
        let mut f = SpectralField::zeros(g);
        f.coeffs_mut()[[1, 0]] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            inverse_transform(&f),
            Err(SqgError::HermitianViolation { .. })
        ));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let g = grid(8);
        assert!(forward_transform(&Array2::zeros((8, 16)), &g).is_err());
    }

    #[test]
    fn pair_transforms_agree_with_single() {
        let g = grid(32);
        let a = sample(&g, |x, y| (x + 2.0 * y).sin() + 0.3 * (5.0 * x).cos());
        let b = sample(&g, |x, y| (3.0 * x - y).cos() * (y).sin());
        let (fa, fb) = forward_pair(&a, &b, &g).unwrap();
        let sa = forward_transform(&a, &g).unwrap();
        let sb = forward_transform(&b, &g).unwrap();
        assert!(fa.sub(&sa).unwrap().max_abs() < 1e-15);
        assert!(fb.sub(&sb).unwrap().max_abs() < 1e-15);
        let (ra, rb) = inverse_pair(&sa, &sb).unwrap();
        assert!((&ra - &a).iter().fold(0.0f64, |m, v| m.max(v.abs())) < 1e-13);
        assert!((&rb - &b).iter().fold(0.0f64, |m, v| m.max(v.abs())) < 1e-13);
    }

    #[test]
    fn inner_product_of_cosines() {
        let g = grid(16);
        let f = SpectralField::cosine_mode(g, 1, 0, 1.0);
        let v = f.inner(&f).unwrap();
        assert!((v - 2.0 * PI * PI).abs() < 1e-12);
    }
}
