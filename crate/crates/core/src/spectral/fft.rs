//! Square 2D FFTs on row-major complex buffers.
//!
//! Plans are cached per thread. Row passes run on the rayon pool; every row
//! is transformed independently, so results do not depend on scheduling.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

type PlanCache = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

thread_local! {
    static PLANNER: RefCell<(FftPlanner<f64>, PlanCache)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

/// Cached 1D plan of length `n`.
pub fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|cell| {
        let mut guard = cell.borrow_mut();
        let (planner, cache) = &mut *guard;
        cache
            .entry((n, inverse))
            .or_insert_with(|| {
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

const PAR_MIN_N: usize = 64;
const TILE: usize = 32;

fn rows_pass(data: &mut [Complex64], n: usize, fft: &Arc<dyn Fft<f64>>) {
    if n < PAR_MIN_N {
        fft.process(data);
        return;
    }
    let threads = rayon::current_num_threads().max(1);
    let rows_per_chunk = n.div_ceil(threads * 2).max(1);
    data.par_chunks_mut(rows_per_chunk * n).for_each(|chunk| {
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(chunk, &mut scratch);
    });
}

/// In-place transpose of an n×n row-major buffer.
pub fn transpose(data: &mut [Complex64], n: usize) {
    for bi in (0..n).step_by(TILE) {
        for bj in (bi..n).step_by(TILE) {
            for i in bi..(bi + TILE).min(n) {
                let start = if bi == bj { i + 1 } else { bj };
                for j in start..(bj + TILE).min(n) {
                    data.swap(i * n + j, j * n + i);
                }
            }
        }
    }
}

/// Unnormalized 2D transform, e^{-ik·x} when forward and e^{+ik·x} when inverse.
pub fn fft2(data: &mut [Complex64], n: usize, inverse: bool) {
    debug_assert_eq!(data.len(), n * n);
    let fft = plan(n, inverse);
    rows_pass(data, n, &fft);
    transpose(data, n);
    rows_pass(data, n, &fft);
    transpose(data, n);
}

/// Unnormalized 1D transform.
pub fn fft1(data: &mut [Complex64], inverse: bool) {
    let fft = plan(data.len(), inverse);
    fft.process(data);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transpose_roundtrip() {
        let n = 70;
        let orig: Vec<Complex64> = (0..n * n).map(|i| Complex64::new(i as f64, -(i as f64))).collect();
        let mut d = orig.clone();
        transpose(&mut d, n);
        assert_eq!(d[3 * n + 5], orig[5 * n + 3]);
        transpose(&mut d, n);
        assert_eq!(d, orig);
    }

    #[test]
    fn matches_direct_dft() {
        let n = 8;
        let data: Vec<Complex64> = (0..n * n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut fast = data.clone();
        fft2(&mut fast, n, false);
        for k1 in 0..n {
            for k2 in 0..n {
                let mut acc = Complex64::default();
                for x1 in 0..n {
                    for x2 in 0..n {
                        let ph = -2.0 * std::f64::consts::PI * ((k1 * x1 + k2 * x2) as f64) / n as f64;
                        acc += data[x1 * n + x2] * Complex64::from_polar(1.0, ph);
                    }
                }
                assert!((acc - fast[k1 * n + k2]).norm() < 1e-12);
            }
        }
    }
}
