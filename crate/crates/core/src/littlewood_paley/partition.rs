use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spectral::multiplier::apply_symbol;
use crate::spectral::{GridSpec, SpectralField};

/// φ₀ equals 1 up to this radius.
pub const INNER_RADIUS: f64 = 1.0;
/// φ₀ vanishes from this radius on.
pub const OUTER_RADIUS: f64 = 7.0 / 6.0;

#[inline]
fn psi(y: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else {
        (-1.0 / y).exp()
    }
}

/// C^∞ radial cutoff: 1 on [0, 1], 0 on [7/6, ∞), smooth monotone transition
/// ψ(1-x)/(ψ(1-x)+ψ(x)) with ψ(y) = e^{-1/y} and x the rescaled radius.
#[inline]
pub fn phi0(r: f64) -> f64 {
    if r <= INNER_RADIUS {
        return 1.0;
    }
    if r >= OUTER_RADIUS {
        return 0.0;
    }
    let x = (r - INNER_RADIUS) / (OUTER_RADIUS - INNER_RADIUS);
    let a = psi(1.0 - x);
    let b = psi(x);
    a / (a + b)
}

/// φ(r) = φ₀(r) - φ₀(2r), supported in [1/2, 7/6].
#[inline]
pub fn phi(r: f64) -> f64 {
    phi0(r) - phi0(2.0 * r)
}

/// Block index range of the dyadic decomposition on a grid.
///
/// `j_low` is the largest index whose low-pass keeps only the mean, so
/// `P_{≤j_low} + Σ_{j_low < j ≤ j_max} P_j` is the identity on the lattice.
/// Blocks above `verified_j_max` reach past the dealias radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicPartition {
    pub j_low: i32,
    pub j_max: i32,
    pub verified_j_max: i32,
}

impl DyadicPartition {
    pub fn for_grid(grid: &GridSpec) -> Self {
        let unit = grid.unit();
        let mut j_low = (unit / OUTER_RADIUS).log2().floor() as i32;
        while (j_low as f64).exp2() * OUTER_RADIUS >= unit {
            j_low -= 1;
        }
        let kmax = grid.max_wavenumber();
        let mut j_max = kmax.log2().ceil() as i32;
        while (j_max as f64).exp2() < kmax {
            j_max += 1;
        }
        let mut verified = (grid.dealias_radius() / OUTER_RADIUS).log2().floor() as i32;
        while (verified as f64 + 1.0).exp2() * OUTER_RADIUS <= grid.dealias_radius() {
            verified += 1;
        }
        while (verified as f64).exp2() * OUTER_RADIUS > grid.dealias_radius() {
            verified -= 1;
        }
        Self {
            j_low,
            j_max,
            verified_j_max: verified,
        }
    }

    /// Indices j_low..=j_max; the first stands for the low-pass block.
    pub fn indices(&self) -> std::ops::RangeInclusive<i32> {
        self.j_low..=self.j_max
    }

    /// Symbol of the i-th block of the partition of unity: the low-pass at
    /// `j_low` and φ(2^{-j}·) above.
    pub fn piece(&self, j: i32, r: f64) -> f64 {
        if j == self.j_low {
            phi0(r * (-j as f64).exp2())
        } else {
            phi(r * (-j as f64).exp2())
        }
    }
}

/// The frozen profile on a grid: the partition realized by [`phi0`].
pub fn concrete_phi0(grid: &GridSpec) -> DyadicPartition {
    DyadicPartition::for_grid(grid)
}

/// P_j f, symbol φ(2^{-j}ξ).
pub fn project_block(field: &SpectralField, j: i32) -> SpectralField {
    let s = (-j as f64).exp2();
    apply_symbol(field, |k1, k2| Complex64::new(phi(k1.hypot(k2) * s), 0.0), false)
}

/// P_{≤j} f, symbol φ₀(2^{-j}ξ).
pub fn project_low(field: &SpectralField, j: i32) -> SpectralField {
    let s = (-j as f64).exp2();
    apply_symbol(field, |k1, k2| Complex64::new(phi0(k1.hypot(k2) * s), 0.0), false)
}

/// P_{>j} f = f - P_{≤j} f, symbol 1 - φ₀(2^{-j}ξ).
pub fn project_high(field: &SpectralField, j: i32) -> SpectralField {
    let s = (-j as f64).exp2();
    apply_symbol(field, |k1, k2| Complex64::new(1.0 - phi0(k1.hypot(k2) * s), 0.0), false)
}

/// Pieces of the partition of unity applied to `field`, indexed from `j_low`.
pub fn decompose(field: &SpectralField, part: &DyadicPartition) -> Vec<(i32, SpectralField)> {
    part.indices()
        .map(|j| {
            let f = if j == part.j_low {
                project_low(field, j)
            } else {
                project_block(field, j)
            };
            (j, f)
        })
        .collect()
}

/// Samples r, φ₀(r), φ(r) on `points` equispaced radii in [0, 1.5].
pub fn profile_table(points: usize) -> Vec<(f64, f64, f64)> {
    let m = points.max(2) - 1;
    (0..=m)
        .map(|i| {
            let r = 1.5 * i as f64 / m as f64;
            (r, phi0(r), phi(r))
        })
        .collect()
}

pub fn write_profile_csv<W: Write>(points: usize, mut w: W) -> Result<()> {
    writeln!(w, "r,phi0,phi")?;
    for (r, a, b) in profile_table(points) {
        writeln!(w, "{r:e},{a:e},{b:e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_field;
    use rand::{Rng, SeedableRng};

    #[test]
    fn profile_values() {
        assert_eq!(phi0(0.9), 1.0);
        assert_eq!(phi0(1.0), 1.0);
        assert_eq!(phi0(1.2), 0.0);
        assert_eq!(phi0(7.0 / 6.0), 0.0);
        assert_eq!(phi(0.4), 0.0);
        assert_eq!(phi(1.2), 0.0);
        assert_eq!(phi(0.6), 1.0);
        let mid = phi0(1.0 + 1.0 / 12.0);
        assert!((mid - 0.5).abs() < 1e-13);
    }

    #[test]
    fn profile_monotone_and_smooth() {
        let mut prev = 1.0;
        for i in 0..=10_000 {
            let r = 0.9 + 0.4 * i as f64 / 10_000.0;
            let v = phi0(r);
            assert!(v <= prev + 1e-15);
            assert!((0.0..=1.0).contains(&v));
            prev = v;
        }
        // flat contact at both ends: derivatives vanish to all orders
        let h = 1e-3;
        assert!(1.0 - phi0(1.0 + h) < 1e-40);
        assert!(phi0(OUTER_RADIUS - h) < 1e-40);
    }

    #[test]
    fn partition_of_unity_on_random_lattice_points() {
        let g = GridSpec::square(256).unwrap();
        let part = DyadicPartition::for_grid(&g);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let m1: i64 = rng.random_range(-128..128);
            let m2: i64 = rng.random_range(-128..128);
            let r = ((m1 * m1 + m2 * m2) as f64).sqrt() * g.unit();
            let s: f64 = part.indices().map(|j| part.piece(j, r)).sum();
            assert!((s - 1.0).abs() < 1e-12, "sum {s} at r {r}");
        }
    }

    #[test]
    fn block_range_for_default_grids() {
        let g = GridSpec::square(256).unwrap();
        let p = DyadicPartition::for_grid(&g);
        assert_eq!(p.j_low, -1);
        assert_eq!(p.j_max, 8);
        assert_eq!(p.verified_j_max, 6);
        let g = GridSpec::with_period(128, 2.0 * std::f64::consts::PI / 16.0).unwrap();
        let p = DyadicPartition::for_grid(&g);
        assert_eq!(p.j_low, 3);
        assert_eq!(p.verified_j_max, 9);
    }

    #[test]
    fn reconstruction() {
        let g = GridSpec::square(64).unwrap();
        let mut f = random_field(g, 1, 0.5);
        f.coeffs_mut()[[0, 0]] = Complex64::new(0.7, 0.0);
        let part = DyadicPartition::for_grid(&g);
        let mut sum = SpectralField::zeros(g);
        for (_, piece) in decompose(&f, &part) {
            sum = sum.add(&piece).unwrap();
        }
        assert!(sum.sub(&f).unwrap().l2_norm() <= 1e-12 * f.l2_norm());
        let lh = project_low(&f, 3).add(&project_high(&f, 3)).unwrap();
        assert!(lh.sub(&f).unwrap().l2_norm() <= 1e-14 * f.l2_norm());
    }

    #[test]
    fn distant_blocks_are_orthogonal() {
        let g = GridSpec::square(128).unwrap();
        let f = random_field(g, 2, 0.0);
        for j in 0..5 {
            let a = project_block(&project_block(&f, j), j + 5);
            assert_eq!(a.max_abs(), 0.0);
            let b = project_block(&project_block(&f, j), j + 2);
            assert_eq!(b.max_abs(), 0.0);
        }
    }

    #[test]
    fn profile_csv_has_header() {
        let mut buf = Vec::new();
        write_profile_csv(4, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().count(), 5);
        assert!(s.starts_with("r,phi0,phi"));
    }
}
