//! Least-squares line fits.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Ordinary least squares y ≈ slope·x + intercept. Needs two distinct x.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let m = x.len().min(y.len());
    if m < 2 {
        return None;
    }
    let mx = x[..m].iter().sum::<f64>() / m as f64;
    let my = y[..m].iter().sum::<f64>() / m as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for i in 0..m {
        let dx = x[i] - mx;
        let dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Some(LineFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        points: m,
    })
}

/// Fit of log₂ y against x, skipping nonpositive y.
pub fn log2_fit(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter(|(_, v)| **v > 0.0 && v.is_finite())
        .map(|(a, v)| (*a, v.log2()))
        .unzip();
    linear_fit(&xs, &ys)
}
