use super::Series;
use crate::error::{Error, Result};

/// Finite-size crossing of curves indexed by system size.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Crossing {
    /// Crossing of the two largest sizes.
    pub estimate: f64,
    /// Largest deviation of any pairwise crossing from `estimate`.
    pub error: f64,
    /// `(L_a, L_b, crossing)` for every pair that crosses in the grid.
    pub pairs: Vec<(usize, usize, f64)>,
}

/// First sign change of `a − b` on the shared grid, linearly interpolated.
fn pair_crossing(a: &Series, b: &Series) -> Option<f64> {
    let d: Vec<(f64, f64)> = a
        .x
        .iter()
        .zip(&a.y)
        .filter_map(|(&x, &ya)| b.interpolate(x).map(|yb| (x, ya - yb)))
        .collect();
    d.windows(2).find_map(|w| {
        let ((x0, d0), (x1, d1)) = (w[0], w[1]);
        if d0 == 0.0 {
            Some(x0)
        } else if d0 * d1 < 0.0 {
            Some(x0 + (x1 - x0) * d0 / (d0 - d1))
        } else {
            None
        }
    })
}

/// Pairwise crossings by local linear interpolation. Every curve needs its
/// size in `meta.l`.
pub fn crossing_finder(curves: &[Series]) -> Result<Crossing> {
    if curves.len() < 2 {
        return Err(Error::Fit("a crossing needs at least two sizes".into()));
    }
    let mut sized: Vec<(usize, &Series)> = curves
        .iter()
        .map(|c| c.meta.l.map(|l| (l, c)).ok_or_else(|| Error::Fit("curve without system size".into())))
        .collect::<Result<_>>()?;
    sized.sort_by_key(|(l, _)| *l);
    let mut pairs = Vec::new();
    for i in 0..sized.len() {
        for j in i + 1..sized.len() {
            if let Some(x) = pair_crossing(sized[i].1, sized[j].1) {
                pairs.push((sized[i].0, sized[j].0, x));
            }
        }
    }
    let n = sized.len();
    let (la, lb) = (sized[n - 2].0, sized[n - 1].0);
    let estimate = pairs
        .iter()
        .find(|(a, b, _)| *a == la && *b == lb)
        .map(|p| p.2)
        .ok_or(Error::NoCrossing)?;
    let error = pairs.iter().map(|p| (p.2 - estimate).abs()).fold(0.0, f64::max);
    Ok(Crossing { estimate, error, pairs })
}
