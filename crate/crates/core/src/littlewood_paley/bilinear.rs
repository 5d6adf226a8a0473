use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::partition::{phi, phi0};
use crate::error::{Result, SqgError};
use crate::spectral::SpectralField;

/// Term count above which a warning is logged.
pub const WARN_TERMS: u64 = 10_000_000;
/// Default hard cap on the number of (ξ, η) pairs.
pub const DEFAULT_TERM_CAP: u64 = 200_000_000;

/// Annulus `lo ≤ |·| ≤ hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialBand {
    pub lo: f64,
    pub hi: f64,
}

impl RadialBand {
    pub const ALL: RadialBand = RadialBand {
        lo: 0.0,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    #[inline]
    pub fn contains(&self, r: f64) -> bool {
        r >= self.lo && r <= self.hi
    }
}

/// Where a symbol may be nonzero; pairs outside are skipped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolSupport {
    pub xi: RadialBand,
    pub eta: RadialBand,
    pub sum: RadialBand,
}

impl Default for SymbolSupport {
    fn default() -> Self {
        Self {
            xi: RadialBand::ALL,
            eta: RadialBand::ALL,
            sum: RadialBand::ALL,
        }
    }
}

type SymbolFn = dyn Fn([f64; 2], [f64; 2]) -> Complex64 + Send + Sync;

/// σ(ξ, η) together with its support descriptor.
#[derive(Clone)]
pub struct BilinearSymbol {
    eval: Arc<SymbolFn>,
    pub support: SymbolSupport,
}

impl fmt::Debug for BilinearSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BilinearSymbol")
            .field("support", &self.support)
            .finish()
    }
}

#[inline]
fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

#[inline]
fn add(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] + b[0], a[1] + b[1]]
}

/// |ξ|^γ + |η|^γ - |ξ+η|^γ
#[inline]
pub fn phase(xi: [f64; 2], eta: [f64; 2], gamma: f64) -> f64 {
    norm(xi).powf(gamma) + norm(eta).powf(gamma) - norm(add(xi, eta)).powf(gamma)
}

impl BilinearSymbol {
    pub fn new(eval: impl Fn([f64; 2], [f64; 2]) -> Complex64 + Send + Sync + 'static, support: SymbolSupport) -> Self {
        Self {
            eval: Arc::new(eval),
            support,
        }
    }

    #[inline]
    pub fn eval(&self, xi: [f64; 2], eta: [f64; 2]) -> Complex64 {
        (self.eval)(xi, eta)
    }

    /// σ ≡ 1, the plain product.
    pub fn one() -> Self {
        Self::new(|_, _| Complex64::new(1.0, 0.0), SymbolSupport::default())
    }

    /// e^{-t(|ξ|^γ + |η|^γ - |ξ+η|^γ)}
    pub fn phase_weight(t: f64, gamma: f64) -> Self {
        Self::new(
            move |xi, eta| Complex64::new((-t * phase(xi, eta, gamma)).exp(), 0.0),
            SymbolSupport::default(),
        )
    }

    /// Phase weight localized to |ξ| ≪ 2^j, |η| ∼ 2^j.
    ///
    /// `|ξ| ≪ 2^j` is realized as φ₀(2^{3-j}ξ) and `|η| ∼ 2^j` as φ(2^{-j}η).
    pub fn sigma1(j: i32, t: f64, gamma: f64) -> Self {
        let s = (-j as f64).exp2();
        let support = SymbolSupport {
            xi: RadialBand::new(0.0, super::partition::OUTER_RADIUS / (8.0 * s)),
            eta: RadialBand::new(0.5 / s, super::partition::OUTER_RADIUS / s),
            sum: RadialBand::ALL,
        };
        Self::new(
            move |xi, eta| {
                let w = phi0(8.0 * s * norm(xi)) * phi(s * norm(eta));
                Complex64::new(w * (-t * phase(xi, eta, gamma)).exp(), 0.0)
            },
            support,
        )
    }

    /// Phase weight localized to |ξ| ∼ 2^j, |η| ≪ 2^j.
    pub fn sigma2(j: i32, t: f64, gamma: f64) -> Self {
        let s1 = Self::sigma1(j, t, gamma);
        let support = SymbolSupport {
            xi: s1.support.eta,
            eta: s1.support.xi,
            sum: RadialBand::ALL,
        };
        Self::new(move |xi, eta| s1.eval(eta, xi), support)
    }

    /// Phase weight with |ξ|, |η| ∼ 2^j and |ξ+η| ≪ 2^j.
    pub fn sigma0(j: i32, t: f64, gamma: f64) -> Self {
        let s = (-j as f64).exp2();
        let band = RadialBand::new(0.5 / s, super::partition::OUTER_RADIUS / s);
        let support = SymbolSupport {
            xi: band,
            eta: band,
            sum: RadialBand::new(0.0, super::partition::OUTER_RADIUS / (8.0 * s)),
        };
        Self::new(
            move |xi, eta| {
                let w = phi(s * norm(xi)) * phi(s * norm(eta)) * phi0(8.0 * s * norm(add(xi, eta)));
                Complex64::new(w * (-t * phase(xi, eta, gamma)).exp(), 0.0)
            },
            support,
        )
    }

    /// Phase weight with all three of |ξ|, |η|, |ξ+η| ∼ 2^j.
    pub fn sigma3(j: i32, t: f64, gamma: f64) -> Self {
        let s = (-j as f64).exp2();
        let band = RadialBand::new(0.5 / s, super::partition::OUTER_RADIUS / s);
        let support = SymbolSupport {
            xi: band,
            eta: band,
            sum: band,
        };
        Self::new(
            move |xi, eta| {
                let w = phi(s * norm(xi)) * phi(s * norm(eta)) * phi(s * norm(add(xi, eta)));
                Complex64::new(w * (-t * phase(xi, eta, gamma)).exp(), 0.0)
            },
            support,
        )
    }
}

/// Options for [`apply_bilinear_symbol_with`].
#[derive(Debug, Clone, Copy)]
pub struct BilinearOptions {
    pub term_cap: u64,
}

impl Default for BilinearOptions {
    fn default() -> Self {
        Self {
            term_cap: DEFAULT_TERM_CAP,
        }
    }
}

struct Mode {
    m: [i64; 2],
    k: [f64; 2],
    c: Complex64,
}

fn modes(field: &SpectralField, band: RadialBand) -> Vec<Mode> {
    let g = field.grid();
    let mut out = Vec::new();
    for ((i1, i2), &c) in field.coeffs().indexed_iter() {
        if c == Complex64::default() {
            continue;
        }
        let k = [g.wavenumber(i1), g.wavenumber(i2)];
        if !band.contains(norm(k)) {
            continue;
        }
        out.push(Mode {
            m: [g.signed_index(i1), g.signed_index(i2)],
            k,
            c,
        });
    }
    out
}

/// T_σ(f,g)(x) = Σ_{ξ,η} σ(ξ,η) f̂(ξ) ĝ(η) e^{i(ξ+η)·x} by direct double summation.
///
/// Output frequencies are wrapped onto the lattice. Summation order is fixed,
/// so the result does not depend on the thread count.
pub fn apply_bilinear_symbol(sigma: &BilinearSymbol, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    apply_bilinear_symbol_with(sigma, f, g, BilinearOptions::default())
}

pub fn apply_bilinear_symbol_with(
    sigma: &BilinearSymbol,
    f: &SpectralField,
    g: &SpectralField,
    opts: BilinearOptions,
) -> Result<SpectralField> {
    f.check_grid(g)?;
    let grid = *f.grid();
    let fm = modes(f, sigma.support.xi);
    let gm = modes(g, sigma.support.eta);
    let terms = fm.len() as u64 * gm.len() as u64;
    if terms > opts.term_cap {
        return Err(SqgError::CostCap {
            terms,
            cap: opts.term_cap,
        });
    }
    if terms > WARN_TERMS {
        log::warn!("bilinear symbol: {terms} terms in direct summation");
    }
    let n = grid.n();
    const CHUNKS: usize = 32;
    let chunk = fm.len().div_ceil(CHUNKS).max(1);
    let partials: Vec<Vec<Complex64>> = fm
        .par_chunks(chunk)
        .map(|block| {
            let mut acc = vec![Complex64::default(); n * n];
            for a in block {
                for b in &gm {
                    let sum = add(a.k, b.k);
                    if !sigma.support.sum.contains(norm(sum)) {
                        continue;
                    }
                    let w = sigma.eval(a.k, b.k);
                    if w == Complex64::default() {
                        continue;
                    }
                    let i1 = grid.storage_index(a.m[0] + b.m[0]);
                    let i2 = grid.storage_index(a.m[1] + b.m[1]);
                    acc[i1 * n + i2] += w * a.c * b.c;
                }
            }
            acc
        })
        .collect();
    let mut out = SpectralField::zeros(grid);
    let dst = out.as_slice_mut();
    for p in partials {
        for (d, v) in dst.iter_mut().zip(p) {
            *d += v;
        }
    }
    Ok(out)
}
