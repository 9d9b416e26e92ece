use nalgebra::{DMatrix, DVector};

use super::Series;
use crate::error::{Error, Result};

/// Result of a linear least-squares fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub coef: Vec<f64>,
    /// Parameter covariance.
    pub cov: Vec<Vec<f64>>,
    pub chi2: f64,
}

impl LinearFit {
    pub fn err(&self, i: usize) -> f64 {
        self.cov[i][i].max(0.0).sqrt()
    }
}

/// Least squares for `y ≈ Σ_k coef_k · design[i][k]`.
///
/// With `sigma`, points are weighted by `1/σ²` and the covariance is
/// `(AᵀWA)⁻¹`. Without, the covariance is scaled by the residual variance.
pub fn linear_least_squares(design: &[Vec<f64>], y: &[f64], sigma: Option<&[f64]>) -> Result<LinearFit> {
    let n = y.len();
    let k = design.first().map_or(0, Vec::len);
    if design.len() != n || k == 0 || design.iter().any(|r| r.len() != k) {
        return Err(Error::Fit("design matrix shape does not match data".into()));
    }
    if n < k {
        return Err(Error::Fit(format!("{n} points cannot fix {k} parameters")));
    }
    let w: Vec<f64> = match sigma {
        Some(s) if s.len() != n => return Err(Error::Fit("sigma length mismatch".into())),
        Some(s) if s.iter().all(|&v| v > 0.0 && v.is_finite()) => s.iter().map(|v| 1.0 / (v * v)).collect(),
        Some(_) => return Err(Error::Fit("standard errors must be positive".into())),
        None => vec![1.0; n],
    };
    let a = DMatrix::from_fn(n, k, |i, j| design[i][j]);
    let yv = DVector::from_column_slice(y);
    let wv = DVector::from_vec(w);
    let mut ata = DMatrix::zeros(k, k);
    let mut aty = DVector::zeros(k);
    for i in 0..n {
        let row = a.row(i);
        ata += row.transpose() * row * wv[i];
        aty += row.transpose() * (yv[i] * wv[i]);
    }
    let inv = ata.try_inverse().ok_or_else(|| Error::Fit("singular normal equations".into()))?;
    let coef = &inv * aty;
    let chi2: f64 = (0..n).map(|i| wv[i] * (yv[i] - (a.row(i) * &coef)[0]).powi(2)).sum();
    let scale = if sigma.is_none() {
        if n > k {
            chi2 / (n - k) as f64
        } else {
            0.0
        }
    } else {
        1.0
    };
    let cov = (0..k).map(|i| (0..k).map(|j| inv[(i, j)] * scale).collect()).collect();
    Ok(LinearFit { coef: coef.iter().copied().collect(), cov, chi2 })
}

/// `y = amplitude · x^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub exponent_err: f64,
    pub amplitude: f64,
    pub amplitude_err: f64,
    pub points: usize,
}

/// Weighted least squares of `ln y` against `ln x` over points with
/// `x ∈ [lo, hi]`. Error bars are used when every point in the window has
/// one.
pub fn powerlaw_fit(series: &Series, window: (f64, f64)) -> Result<PowerLawFit> {
    let idx: Vec<usize> = (0..series.len()).filter(|&i| series.x[i] >= window.0 && series.x[i] <= window.1).collect();
    if idx.len() < 2 {
        return Err(Error::Fit(format!("only {} points in window {window:?}", idx.len())));
    }
    if let Some(&i) = idx.iter().find(|&&i| !(series.x[i] > 0.0 && series.y[i] > 0.0)) {
        return Err(Error::Fit(format!("nonpositive data at x = {}, y = {}", series.x[i], series.y[i])));
    }
    let design: Vec<Vec<f64>> = idx.iter().map(|&i| vec![1.0, series.x[i].ln()]).collect();
    let ly: Vec<f64> = idx.iter().map(|&i| series.y[i].ln()).collect();
    let sig: Vec<f64> = idx.iter().map(|&i| series.yerr[i] / series.y[i]).collect();
    let weighted = sig.iter().all(|&s| s > 0.0);
    let fit = linear_least_squares(&design, &ly, weighted.then_some(sig.as_slice()))?;
    let amplitude = fit.coef[0].exp();
    Ok(PowerLawFit {
        exponent: fit.coef[1],
        exponent_err: fit.err(1),
        amplitude,
        amplitude_err: amplitude * fit.err(0),
        points: idx.len(),
    })
}
