use super::Series;
use crate::error::{Error, Result};

/// Best `(p_c, ν)` on a grid and its objective.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CollapseFit {
    pub p_c: f64,
    pub nu: f64,
    pub objective: f64,
}

/// Mean squared mismatch of curves replotted against `(p − p_c) L^{1/ν}`.
///
/// Each point is compared with every other curve linearly interpolated at
/// the same scaled abscissa, where that curve covers it. The dynamical
/// exponent is fixed to one, so `y` is not rescaled.
pub fn collapse_quality(curves: &[Series], p_c: f64, nu: f64) -> Result<f64> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::InvalidParameter(format!("ν must be positive, got {nu}")));
    }
    let scaled: Vec<Series> = curves
        .iter()
        .map(|c| {
            let l = c.meta.l.ok_or_else(|| Error::Fit("curve without system size".into()))? as f64;
            let mut s = c.clone();
            s.x = c.x.iter().map(|p| (p - p_c) * l.powf(1.0 / nu)).collect();
            Ok(s)
        })
        .collect::<Result<_>>()?;
    let mut sum = 0.0;
    let mut count = 0usize;
    for (i, a) in scaled.iter().enumerate() {
        for (j, b) in scaled.iter().enumerate() {
            if i == j {
                continue;
            }
            for (&x, &y) in a.x.iter().zip(&a.y) {
                if let Some(yb) = b.interpolate(x) {
                    sum += (y - yb).powi(2);
                    count += 1;
                }
            }
        }
    }
    if count == 0 {
        return Err(Error::NumericalDegeneracy("rescaled curves do not overlap".into()));
    }
    Ok(sum / count as f64)
}

/// Grid search over `p_c ∈ pc_range`, `ν ∈ nu_range` with `steps` points
/// each.
pub fn collapse_grid_search(
    curves: &[Series],
    pc_range: (f64, f64),
    nu_range: (f64, f64),
    steps: usize,
) -> Result<CollapseFit> {
    if steps < 2 || !(pc_range.1 > pc_range.0) || !(nu_range.1 > nu_range.0) {
        return Err(Error::NumericalDegeneracy("degenerate collapse grid".into()));
    }
    let at = |r: (f64, f64), k: usize| r.0 + (r.1 - r.0) * k as f64 / (steps - 1) as f64;
    let mut best: Option<CollapseFit> = None;
    for i in 0..steps {
        for j in 0..steps {
            let (p_c, nu) = (at(pc_range, i), at(nu_range, j));
            let Ok(objective) = collapse_quality(curves, p_c, nu) else { continue };
            if best.is_none_or(|b| objective < b.objective) {
                best = Some(CollapseFit { p_c, nu, objective });
            }
        }
    }
    best.ok_or_else(|| Error::NumericalDegeneracy("no grid point gives overlapping curves".into()))
}
