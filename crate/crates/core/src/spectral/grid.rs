use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SqgError};

/// Uniform periodic grid on the square torus of side `period`.
///
/// Lattice index `i` along an axis maps to the signed integer frequency
/// `m = i` for `i < n/2` and `m = i - n` otherwise, and to the physical
/// wavenumber `m * 2π / period`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n_per_dim: usize,
    period: f64,
    dealias_fraction: f64,
}

pub const DEFAULT_DEALIAS_FRACTION: f64 = 2.0 / 3.0;

impl GridSpec {
    pub fn new(n_per_dim: usize, period: f64, dealias_fraction: f64) -> Result<Self> {
        if n_per_dim < 8 || n_per_dim % 2 != 0 {
            return Err(SqgError::InvalidGrid(format!(
                "n_per_dim must be even and at least 8, got {n_per_dim}"
            )));
        }
        if !n_per_dim.is_power_of_two() {
            return Err(SqgError::InvalidGrid(format!(
                "n_per_dim must be a power of two, got {n_per_dim}"
            )));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(SqgError::InvalidGrid(format!("period must be positive, got {period}")));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(SqgError::InvalidGrid(format!(
                "dealias_fraction must lie in (0, 1], got {dealias_fraction}"
            )));
        }
        Ok(Self {
            n_per_dim,
            period,
            dealias_fraction,
        })
    }

    /// 2π-periodic grid with the 2/3 rule.
    pub fn square(n_per_dim: usize) -> Result<Self> {
        Self::new(n_per_dim, 2.0 * PI, DEFAULT_DEALIAS_FRACTION)
    }

    pub fn with_period(n_per_dim: usize, period: f64) -> Result<Self> {
        Self::new(n_per_dim, period, DEFAULT_DEALIAS_FRACTION)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n_per_dim
    }

    #[inline]
    pub fn period(&self) -> f64 {
        self.period
    }

    #[inline]
    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Number of grid points, n².
    #[inline]
    pub fn len(&self) -> usize {
        self.n_per_dim * self.n_per_dim
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spacing of the physical frequency lattice, 2π / period.
    #[inline]
    pub fn unit(&self) -> f64 {
        2.0 * PI / self.period
    }

    #[inline]
    pub fn signed_index(&self, i: usize) -> i64 {
        let n = self.n_per_dim;
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Storage index of the signed integer frequency `m` (taken mod n).
    #[inline]
    pub fn storage_index(&self, m: i64) -> usize {
        m.rem_euclid(self.n_per_dim as i64) as usize
    }

    #[inline]
    pub fn wavenumber(&self, i: usize) -> f64 {
        self.signed_index(i) as f64 * self.unit()
    }

    /// Storage index of -m.
    #[inline]
    pub fn mirror(&self, i: usize) -> usize {
        (self.n_per_dim - i) % self.n_per_dim
    }

    #[inline]
    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.n_per_dim / 2
    }

    /// Dealias radius in lattice units: fraction · n/2.
    #[inline]
    pub fn dealias_radius_index(&self) -> f64 {
        self.dealias_fraction * (self.n_per_dim / 2) as f64
    }

    /// Dealias radius as a physical wavenumber.
    #[inline]
    pub fn dealias_radius(&self) -> f64 {
        self.dealias_radius_index() * self.unit()
    }

    /// Whether lattice mode (i1, i2) survives the radial dealiasing rule.
    #[inline]
    pub fn keeps(&self, i1: usize, i2: usize) -> bool {
        let m1 = self.signed_index(i1) as f64;
        let m2 = self.signed_index(i2) as f64;
        let r = self.dealias_radius_index();
        m1 * m1 + m2 * m2 <= r * r
    }

    /// Largest |k| on the lattice.
    pub fn max_wavenumber(&self) -> f64 {
        (self.n_per_dim / 2) as f64 * self.unit() * 2f64.sqrt()
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.period / self.n_per_dim as f64
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    /// Physical coordinate of grid index i along an axis.
    #[inline]
    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub(crate) fn same_lattice(&self, other: &GridSpec) -> bool {
        self.n_per_dim == other.n_per_dim
            && self.period == other.period
            && self.dealias_fraction == other.dealias_fraction
    }

    /// Physical wavenumbers along one axis in storage order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n_per_dim).map(|i| self.wavenumber(i)).collect()
    }

    /// |k| for every storage index, row-major.
    pub fn radial_wavenumbers(&self) -> Vec<f64> {
        let k = self.wavenumbers();
        let mut out = Vec::with_capacity(self.len());
        for &k1 in &k {
            for &k2 in &k {
                out.push(k1.hypot(k2));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(GridSpec::square(6).is_err());
        assert!(GridSpec::square(12).is_err());
        assert!(GridSpec::square(9).is_err());
        assert!(GridSpec::new(16, -1.0, 0.5).is_err());
        assert!(GridSpec::new(16, 1.0, 1.5).is_err());
        assert!(GridSpec::square(8).is_ok());
    }

    #[test]
    fn lattice_layout() {
        let g = GridSpec::square(8).unwrap();
        let m: Vec<i64> = (0..8).map(|i| g.signed_index(i)).collect();
        assert_eq!(m, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert_eq!(g.mirror(1), 7);
        assert_eq!(g.mirror(0), 0);
        assert_eq!(g.mirror(4), 4);
        assert_eq!(g.storage_index(-3), 5);
        let h = GridSpec::with_period(8, PI).unwrap();
        assert!((h.wavenumber(1) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn two_thirds_rule_keeps_disk() {
        let g = GridSpec::square(64).unwrap();
        assert!(g.keeps(21, 0));
        assert!(!g.keeps(22, 0));
        assert!(g.keeps(15, 15));
        assert!(!g.keeps(16, 16));
    }
}
