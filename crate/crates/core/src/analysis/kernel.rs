use super::linear_least_squares;
use crate::error::{Error, Result};

/// Gaussian fit `A exp(−(x−μ)²/(2σ²))` of a profile at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KernelFit {
    /// `σ² / (2t)`, so that the kernel is `exp(−x²/(4Dt))`.
    pub d: f64,
    pub d_err: f64,
    pub center: f64,
    pub center_err: f64,
    /// Fitted `σ²`.
    pub variance: f64,
    /// Second central moment of the normalized profile.
    pub moment_variance: f64,
}

/// Least-squares Gaussian fit by Gauss-Newton from the moment estimate.
pub fn gaussian_kernel_fit(xs: &[f64], profile: &[f64], t: f64) -> Result<KernelFit> {
    if xs.len() != profile.len() || xs.is_empty() {
        return Err(Error::Fit("profile and positions differ in length".into()));
    }
    if !(t > 0.0) {
        return Err(Error::Fit(format!("time must be positive, got {t}")));
    }
    let total: f64 = profile.iter().sum();
    if !(total.is_finite() && total > 0.0) || profile.iter().any(|v| !v.is_finite()) {
        return Err(Error::Fit("profile is not normalizable".into()));
    }
    let mean = xs.iter().zip(profile).map(|(x, a)| x * a).sum::<f64>() / total;
    let moment_variance = xs.iter().zip(profile).map(|(x, a)| (x - mean).powi(2) * a).sum::<f64>() / total;
    if !(moment_variance > 0.0) {
        return Err(Error::Fit("profile has zero width".into()));
    }
    // Parameters: amplitude, center, variance.
    let mut p = [total / (2.0 * std::f64::consts::PI * moment_variance).sqrt(), mean, moment_variance];
    let model = |p: &[f64; 3], x: f64| p[0] * (-(x - p[1]).powi(2) / (2.0 * p[2])).exp();
    let mut fit = None;
    for _ in 0..100 {
        let design: Vec<Vec<f64>> = xs
            .iter()
            .map(|&x| {
                let g = model(&p, x);
                let u = x - p[1];
                vec![g / p[0], g * u / p[2], g * u * u / (2.0 * p[2] * p[2])]
            })
            .collect();
        let resid: Vec<f64> = xs.iter().zip(profile).map(|(&x, &a)| a - model(&p, x)).collect();
        let step = linear_least_squares(&design, &resid, None)?;
        let delta = step.coef.clone();
        for (pi, di) in p.iter_mut().zip(&delta) {
            *pi += di;
        }
        if !(p[2] > 0.0) {
            return Err(Error::NumericalDegeneracy("Gaussian fit diverged".into()));
        }
        let done = delta.iter().zip(&p).all(|(d, v)| d.abs() <= 1e-13 * v.abs().max(1e-300));
        fit = Some(step);
        if done {
            break;
        }
    }
    let fit = fit.expect("at least one iteration");
    Ok(KernelFit {
        d: p[2] / (2.0 * t),
        d_err: fit.err(2) / (2.0 * t),
        center: p[1],
        center_err: fit.err(1),
        variance: p[2],
        moment_variance,
    })
}
