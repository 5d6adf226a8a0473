use ndarray::Array2;

use super::partition::{project_block, project_low, DyadicPartition};
use crate::error::{Result, SqgError};
use crate::spectral::{inverse_pair, lp_norm, SpectralField};

fn check_exponent(name: &str, v: f64) -> Result<()> {
    if v.is_nan() || v < 1.0 {
        return Err(SqgError::param(format!("Besov exponent {name} must be >= 1, got {v}")));
    }
    Ok(())
}

/// Physical samples of several fields, two per complex transform.
pub(crate) fn to_physical(fields: &[SpectralField]) -> Result<Vec<Array2<f64>>> {
    let mut out = Vec::with_capacity(fields.len());
    for pair in fields.chunks(2) {
        if pair.len() == 2 {
            let (a, b) = inverse_pair(&pair[0], &pair[1])?;
            out.push(a);
            out.push(b);
        } else {
            let z = SpectralField::zeros(*pair[0].grid());
            let (a, _) = inverse_pair(&pair[0], &z)?;
            out.push(a);
        }
    }
    Ok(out)
}

/// ‖P_j f‖_p for j in `js`.
pub fn block_lp_norms(field: &SpectralField, js: &[i32], p: f64) -> Result<Vec<f64>> {
    let blocks: Vec<SpectralField> = js.iter().map(|&j| project_block(field, j)).collect();
    let phys = to_physical(&blocks)?;
    phys.iter().map(|s| lp_norm(s, field.grid(), p)).collect()
}

fn aggregate(terms: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        terms.iter().fold(0.0f64, |a, &b| a.max(b))
    } else {
        terms.iter().map(|t| t.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// Inhomogeneous B^s_{p,q}: ‖P_{≤0}f‖_p + (Σ_{k≥1} 2^{skq}‖P_k f‖_p^q)^{1/q}.
pub fn besov_norm(field: &SpectralField, s: f64, p: f64, q: f64) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    let part = DyadicPartition::for_grid(field.grid());
    let mut fields = vec![project_low(field, 0)];
    let js: Vec<i32> = (1..=part.j_max).collect();
    fields.extend(js.iter().map(|&j| project_block(field, j)));
    let phys = to_physical(&fields)?;
    let low = lp_norm(&phys[0], field.grid(), p)?;
    let mut terms = Vec::with_capacity(js.len());
    for (j, sample) in js.iter().zip(&phys[1..]) {
        terms.push((s * *j as f64).exp2() * lp_norm(sample, field.grid(), p)?);
    }
    Ok(low + aggregate(&terms, q))
}

/// Homogeneous Ḃ^s_{p,q}: (Σ_j 2^{sjq}‖P_j f‖_p^q)^{1/q} over every block above the mean.
pub fn besov_norm_homogeneous(field: &SpectralField, s: f64, p: f64, q: f64) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    let part = DyadicPartition::for_grid(field.grid());
    let js: Vec<i32> = (part.j_low + 1..=part.j_max).collect();
    let norms = block_lp_norms(field, &js, p)?;
    let terms: Vec<f64> = js.iter().zip(&norms).map(|(j, n)| (s * *j as f64).exp2() * n).collect();
    Ok(aggregate(&terms, q))
}
