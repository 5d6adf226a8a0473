//! Decay of dyadic blocks under the fractional heat semigroup.

use super::report::{InequalityReport, LemmaId, SweepRow, TheoreticalBound, Verdict, Witness};
use super::sampler::{argmin, par_samples, BlockSampler};
use crate::error::{Result, SqgError};
use crate::spectral::{apply_multiplier, inverse_transform, lp_norm, GridSpec, MultiplierSpec, SpectralField};

/// Exponents used for the uniformity check of the L^q decay rate.
pub const LQ_EXPONENTS: [f64; 4] = [1.5, 2.0, 3.0, 6.0];

#[derive(Debug, Clone, PartialEq)]
pub struct DecaySetup {
    /// First block; the sweep covers `j0, j0+1, ..., j0+levels-1`.
    pub j0: i32,
    pub levels: u32,
    pub gamma: f64,
    /// Rescaled times τ; the flow runs to t = τ·2^{-jγ}.
    pub taus: Vec<f64>,
    pub n_samples: u64,
    pub seed: u64,
    /// Allowed relative deviation of each c_j from their mean.
    pub stability: f64,
    /// Grid size is 2^{j + oversampling}.
    pub oversampling: u32,
}

impl DecaySetup {
    pub fn new(j0: i32, gamma: f64, seed: u64) -> Self {
        Self {
            j0,
            levels: 3,
            gamma,
            taus: vec![0.1, 0.5, 1.0],
            n_samples: 200,
            seed,
            stability: 0.5,
            oversampling: 4,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 2.0) {
            return Err(SqgError::param(format!(
                "heat decay needs 0 < gamma < 2, got {}",
                self.gamma
            )));
        }
        if self.taus.is_empty() || self.taus.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(SqgError::param("time grid must be nonempty and positive"));
        }
        if self.levels == 0 || self.n_samples == 0 {
            return Err(SqgError::param("need at least one level and one sample"));
        }
        Ok(())
    }

    fn grid(&self, j: i32) -> Result<GridSpec> {
        let e = j + self.oversampling as i32;
        if !(3..=14).contains(&e) {
            return Err(SqgError::param(format!("block {j} needs an unsupported grid 2^{e}")));
        }
        GridSpec::square(1usize << e)
    }

    fn js(&self) -> Vec<i32> {
        (0..self.levels as i32).map(|l| self.j0 + l).collect()
    }
}

/// c = -log(‖e^{-tD^γ}f‖_q / ‖f‖_q)/(t·2^{jγ}) at t = τ·2^{-jγ}.
pub fn decay_constant(field: &SpectralField, j: i32, gamma: f64, q: f64, tau: f64) -> Result<f64> {
    let f0 = lp_norm(&inverse_transform(field)?, field.grid(), q)?;
    if f0 == 0.0 {
        return Err(SqgError::DegenerateSample("zero block".into()));
    }
    let t = tau * (-(j as f64) * gamma).exp2();
    let g = apply_multiplier(field, &MultiplierSpec::heat(1.0, t, gamma))?;
    let f1 = lp_norm(&inverse_transform(&g)?, field.grid(), q)?;
    Ok(-(f1 / f0).ln() / tau)
}

/// Per block, per exponent: the minimum over samples and times of the fitted c,
/// and the sample that attained it.
struct DecayTable {
    js: Vec<i32>,
    /// `[level][q] -> (c, sample)`
    min_c: Vec<Vec<(f64, u64)>>,
}

fn decay_table(setup: &DecaySetup, qs: &[f64]) -> Result<DecayTable> {
    setup.validate()?;
    if qs.iter().any(|&q| !(q >= 1.0)) {
        return Err(SqgError::param("L^q exponents must be >= 1"));
    }
    let sampler = BlockSampler::new(setup.seed);
    let js = setup.js();
    let mut min_c = Vec::with_capacity(js.len());
    for &j in &js {
        let grid = setup.grid(j)?;
        let rows = par_samples(setup.n_samples, |i| {
            let f = sampler.sample(grid, j, i)?;
            let phys = inverse_transform(&f)?;
            let base: Vec<f64> = qs.iter().map(|&q| lp_norm(&phys, &grid, q)).collect::<Result<_>>()?;
            if base.contains(&0.0) {
                return Err(SqgError::DegenerateSample(format!("zero block sample {i}")));
            }
            let mut c = vec![f64::INFINITY; qs.len()];
            for &tau in &setup.taus {
                let t = tau * (-(j as f64) * setup.gamma).exp2();
                let g = inverse_transform(&apply_multiplier(&f, &MultiplierSpec::heat(1.0, t, setup.gamma))?)?;
                for (k, &q) in qs.iter().enumerate() {
                    let v = -(lp_norm(&g, &grid, q)? / base[k]).ln() / tau;
                    c[k] = c[k].min(v);
                }
            }
            Ok(c)
        })?;
        let per_q = (0..qs.len())
            .map(|k| {
                let col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
                let (i, v) = argmin(&col).expect("at least one sample");
                (v, i as u64)
            })
            .collect();
        min_c.push(per_q);
    }
    Ok(DecayTable { js, min_c })
}

fn within(values: &[f64], stability: f64) -> (bool, f64) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let dev = values.iter().fold(0.0f64, |a, v| a.max((v - mean).abs() / mean.abs()));
    (mean > 0.0 && dev <= stability, dev)
}

fn base_report(lemma: LemmaId, setup: &DecaySetup) -> InequalityReport {
    let mut r = InequalityReport::new(lemma, setup.seed)
        .param("gamma", setup.gamma)
        .param("j0", setup.j0 as f64)
        .param("levels", setup.levels as f64)
        .threshold("stability", setup.stability);
    for (i, tau) in setup.taus.iter().enumerate() {
        r.parameters.insert(format!("tau_{i}"), *tau);
    }
    r.n_samples = setup.n_samples * setup.levels as u64;
    r.theoretical_bound = TheoreticalBound::UNKNOWN;
    r
}

fn attach_witness(r: &mut InequalityReport, setup: &DecaySetup, j: i32, sample: u64, value: f64) -> Result<()> {
    let f = BlockSampler::new(setup.seed).sample(setup.grid(j)?, j, sample)?;
    r.witness = Some(Witness::field(sample, value, &f)?);
    Ok(())
}

fn single_q_report(
    lemma: LemmaId,
    setup: &DecaySetup,
    table: &DecayTable,
    k: usize,
    q: f64,
) -> Result<InequalityReport> {
    let mut r = base_report(lemma, setup).param("q", q);
    let cs: Vec<f64> = table.min_c.iter().map(|row| row[k].0).collect();
    for (l, &j) in table.js.iter().enumerate() {
        r.sweep.push(SweepRow {
            j: Some(j),
            p: None,
            q: Some(q),
            gamma: Some(setup.gamma),
            t: None,
            measured_ratio: cs[l],
        });
        r.measure(format!("c_j{j}"), cs[l]);
    }
    let (lw, cmin) = argmin(&cs).expect("nonempty levels");
    let (stable, dev) = within(&cs, setup.stability);
    r.measured_constant = cmin;
    r.measure("max_relative_deviation", dev);
    r.verdict = Verdict::from_bool(cmin > 0.0 && stable);
    attach_witness(&mut r, setup, table.js[lw], table.min_c[lw][k].1, cmin)?;
    Ok(r)
}

/// Fits the block decay rate c for one exponent q ∈ [1, ∞] across the levels
/// of `setup`. Passes iff every fitted c is positive and all lie within the
/// stability band around their mean.
pub fn check_heat_decay(setup: &DecaySetup, q: f64) -> Result<InequalityReport> {
    let table = decay_table(setup, &[q])?;
    single_q_report(LemmaId::HeatDecay, setup, &table, 0, q)
}

/// [`check_heat_decay`] for several exponents, sharing the flows.
pub fn heat_decay_sweep(setup: &DecaySetup, qs: &[f64]) -> Result<Vec<InequalityReport>> {
    let table = decay_table(setup, qs)?;
    qs.iter()
        .enumerate()
        .map(|(k, &q)| single_q_report(LemmaId::HeatDecay, setup, &table, k, q))
        .collect()
}

/// The L^q version: each of `qs` (all in (1, ∞)) must pass the heat decay
/// protocol, and the fitted constants must also be uniform across q.
pub fn check_lq_semigroup_decay(setup: &DecaySetup, qs: &[f64]) -> Result<InequalityReport> {
    if qs.is_empty() || qs.iter().any(|&q| !(q > 1.0 && q.is_finite())) {
        return Err(SqgError::param("L^q semigroup decay needs exponents in (1, inf)"));
    }
    let table = decay_table(setup, qs)?;
    let mut r = base_report(LemmaId::LqSemigroupDecay, setup);
    let mut all = Vec::new();
    let mut each_ok = true;
    for (k, &q) in qs.iter().enumerate() {
        let sub = single_q_report(LemmaId::LqSemigroupDecay, setup, &table, k, q)?;
        each_ok &= sub.passed();
        r.measure(format!("c_min_q{q}"), sub.measured_constant);
        r.sweep.extend(sub.sweep.iter().copied());
        all.extend(table.min_c.iter().map(|row| row[k].0));
    }
    for (i, q) in qs.iter().enumerate() {
        r.parameters.insert(format!("q_{i}"), *q);
    }
    let (uniform, dev) = within(&all, setup.stability);
    let (pos, cmin) = argmin(&all).expect("nonempty");
    r.measured_constant = cmin;
    r.measure("max_relative_deviation_over_q", dev);
    r.verdict = Verdict::from_bool(each_ok && uniform && cmin > 0.0);
    let (l, k) = (pos % table.js.len(), pos / table.js.len());
    attach_witness(&mut r, setup, table.js[l], table.min_c[l][k].1, cmin)?;
    Ok(r)
}
