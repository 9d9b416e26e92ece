//! Haar-averaged operator spreading for qubits as a Markov chain on Pauli
//! strings. A gate on sites `(i, i+1)` leaves `II` alone and replaces any
//! other two-site content by one of the 15 nonidentity contents uniformly.

use rand::Rng;

use crate::analysis::SampleStats;
use crate::circuit::{brickwork_pairs, Boundary};
use crate::error::{param, Error, Result};
use crate::pauli::{Pauli, PauliString};

/// Largest chain for which the full distribution is evolved.
pub const EXACT_MARKOV_CAP: usize = 10;

#[inline]
fn resample<R: Rng + ?Sized>(codes: &mut [u8], a: usize, b: usize, rng: &mut R) {
    if codes[a] != 0 || codes[b] != 0 {
        let c: u8 = rng.random_range(1..16);
        codes[a] = c >> 2;
        codes[b] = c & 3;
    }
}

/// One sampled trajectory of a string under brickwork gates.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovTrajectory {
    pub final_string: PauliString,
    /// Left and right endpoints after each layer, starting with the initial
    /// string; `None` once the string is the identity.
    pub left: Vec<Option<usize>>,
    pub right: Vec<Option<usize>>,
    pub support: Vec<usize>,
}

/// Samples the chain for `depth` brickwork layers (layer 1 first).
pub fn string_markov_run<R: Rng + ?Sized>(
    n: usize,
    depth: usize,
    boundary: Boundary,
    initial: &PauliString,
    rng: &mut R,
) -> Result<MarkovTrajectory> {
    if initial.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: initial.len() });
    }
    let mut codes: Vec<u8> = initial.ops.iter().map(|p| p.code()).collect();
    let layers: [Vec<(usize, usize)>; 2] = [brickwork_pairs(n, 1, boundary)?, brickwork_pairs(n, 2, boundary)?];
    let record = |c: &[u8]| {
        let l = c.iter().position(|&x| x != 0);
        let r = c.iter().rposition(|&x| x != 0);
        (l, r, c.iter().filter(|&&x| x != 0).count())
    };
    let (l, r, s) = record(&codes);
    let (mut left, mut right, mut support) = (vec![l], vec![r], vec![s]);
    for tau in 1..=depth {
        for &(a, b) in &layers[(tau + 1) % 2] {
            resample(&mut codes, a, b, rng);
        }
        let (l, r, s) = record(&codes);
        left.push(l);
        right.push(r);
        support.push(s);
    }
    let final_string = PauliString { negative: false, ops: codes.iter().map(|&c| Pauli::from_code(c)).collect() };
    Ok(MarkovTrajectory { final_string, left, right, support })
}

/// Exact distribution of the chain after `depth` layers, indexed in base 4
/// with site 0 the most significant digit (the layout of `PauliWeights`).
pub fn string_distribution_exact(n: usize, depth: usize, boundary: Boundary, initial: &PauliString) -> Result<Vec<f64>> {
    if n > EXACT_MARKOV_CAP {
        return Err(Error::CapExceeded { what: "exact string distribution sites", size: n, cap: EXACT_MARKOV_CAP });
    }
    if initial.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: initial.len() });
    }
    let dim = 1usize << (2 * n);
    let mut dist = vec![0.0; dim];
    dist[initial.ops.iter().fold(0, |acc, p| 4 * acc + p.code() as usize)] = 1.0;
    for tau in 1..=depth {
        for (a, b) in brickwork_pairs(n, tau, boundary)? {
            let (sa, sb) = (2 * (n - 1 - a), 2 * (n - 1 - b));
            let mask = (3 << sa) | (3 << sb);
            let mut next = vec![0.0; dim];
            for (idx, &w) in dist.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                if idx & mask == 0 {
                    next[idx] += w;
                    continue;
                }
                let rest = idx & !mask;
                for c in 1..16usize {
                    next[rest | ((c >> 2) << sa) | ((c & 3) << sb)] += w / 15.0;
                }
            }
            dist = next;
        }
    }
    Ok(dist)
}

/// Ensemble statistics of the operator front.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FrontProfile {
    pub times: Vec<usize>,
    /// Nonidentity density per site at each checkpoint.
    pub density: Vec<Vec<f64>>,
    /// Right endpoint relative to the start site.
    pub right_mean: Vec<f64>,
    pub right_stderr: Vec<f64>,
    /// Standard deviation of the right endpoint.
    pub width: Vec<f64>,
    /// Mean nonidentity density over sites within `v t / 2` of the start,
    /// with `v` the fitted butterfly velocity.
    pub interior_density: Vec<f64>,
    /// Slope of the mean right endpoint between the last two checkpoints.
    pub v_b: f64,
    pub v_b_err: f64,
    pub samples: usize,
}

/// Samples `samples` strings started as `Z` on site `r` of an open chain of
/// `n` sites and records the front at each checkpoint (ascending). Gates
/// are only applied where the string can change, so the cost scales with
/// the support.
fn check_front(n: usize, r: usize, checkpoints: &[usize]) -> Result<()> {
    if r >= n {
        return Err(Error::InvalidGeometry(format!("start site {r} outside chain of {n}")));
    }
    if checkpoints.is_empty() || checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(param("checkpoints must be positive and increasing"));
    }
    let tmax = *checkpoints.last().expect("nonempty");
    if r < tmax + 1 || n - r < tmax + 2 {
        return Err(Error::InvalidGeometry(format!("chain of {n} sites cannot contain a front after {tmax} layers from site {r}")));
    }
    Ok(())
}

/// Evolves one string started as `Z` on site `r` and calls `visit(k, codes,
/// right_endpoint)` at checkpoint `k`.
fn run_front<R: Rng + ?Sized>(
    codes: &mut [u8],
    r: usize,
    checkpoints: &[usize],
    rng: &mut R,
    mut visit: impl FnMut(usize, &[u8], usize),
) {
    let n = codes.len();
    let tmax = *checkpoints.last().expect("nonempty");
    codes.fill(0);
    codes[r] = Pauli::Z.code();
    let (mut lo, mut hi) = (r, r);
    let mut k = 0;
    for tau in 1..=tmax {
        let start = if tau % 2 == 1 { 0 } else { 1 };
        // First gated bond at or left of `lo`, stepping to `hi`.
        let mut a = lo.saturating_sub(1);
        if a % 2 != start {
            a = a.saturating_sub(1);
        }
        if a % 2 != start {
            a += 1;
        }
        while a <= hi && a + 1 < n {
            resample(codes, a, a + 1, rng);
            a += 2;
        }
        while lo > 0 && codes[lo - 1] != 0 {
            lo -= 1;
        }
        while hi + 1 < n && codes[hi + 1] != 0 {
            hi += 1;
        }
        // Shrink to the actual endpoints.
        while lo < hi && codes[lo] == 0 {
            lo += 1;
        }
        while hi > lo && codes[hi] == 0 {
            hi -= 1;
        }
        if tau == checkpoints[k] {
            visit(k, codes, hi);
            k += 1;
        }
    }
}

/// Right endpoint, relative to `r`, of a single sampled string at each
/// checkpoint. Same geometry as [`otoc_front`].
pub fn front_endpoints<R: Rng + ?Sized>(n: usize, r: usize, checkpoints: &[usize], rng: &mut R) -> Result<Vec<i64>> {
    check_front(n, r, checkpoints)?;
    let mut codes = vec![0u8; n];
    let mut out = Vec::with_capacity(checkpoints.len());
    run_front(&mut codes, r, checkpoints, rng, |_, _, hi| out.push(hi as i64 - r as i64));
    Ok(out)
}

pub fn otoc_front<R: Rng + ?Sized>(n: usize, r: usize, checkpoints: &[usize], samples: usize, rng: &mut R) -> Result<FrontProfile> {
    if samples < 2 || checkpoints.len() < 2 {
        return Err(param("need two samples and at least two checkpoints"));
    }
    check_front(n, r, checkpoints)?;
    let mut density = vec![vec![0.0; n]; checkpoints.len()];
    let mut rights = vec![Vec::with_capacity(samples); checkpoints.len()];
    let mut codes = vec![0u8; n];
    for _ in 0..samples {
        run_front(&mut codes, r, checkpoints, rng, |k, codes, hi| {
            for (d, &c) in density[k].iter_mut().zip(codes) {
                if c != 0 {
                    *d += 1.0;
                }
            }
            rights[k].push(hi as f64 - r as f64);
        });
    }
    density.iter_mut().flatten().for_each(|d| *d /= samples as f64);
    let stats: Vec<SampleStats> = rights.iter().map(|x| SampleStats::from_samples(x)).collect();
    let m = checkpoints.len();
    let dt = (checkpoints[m - 1] - checkpoints[m - 2]) as f64;
    let v_b = (stats[m - 1].mean - stats[m - 2].mean) / dt;
    let v_b_err = (stats[m - 1].stderr.powi(2) + stats[m - 2].stderr.powi(2)).sqrt() / dt;
    let interior_density = checkpoints
        .iter()
        .zip(&density)
        .map(|(&t, d)| {
            let half = (v_b * t as f64 / 2.0).floor() as usize;
            let sites = &d[r - half.min(r)..=(r + half).min(n - 1)];
            sites.iter().sum::<f64>() / sites.len() as f64
        })
        .collect();
    Ok(FrontProfile {
        times: checkpoints.to_vec(),
        density,
        right_mean: stats.iter().map(|s| s.mean).collect(),
        right_stderr: stats.iter().map(|s| s.stderr).collect(),
        width: stats.iter().map(|s| s.std).collect(),
        interior_density,
        v_b,
        v_b_err,
        samples,
    })
}
