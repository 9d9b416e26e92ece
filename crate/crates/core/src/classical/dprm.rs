//! Zero-temperature directed polymer on a square lattice with i.i.d. site
//! energies. Each row the polymer moves by −1, 0 or +1.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::poisson_cut::{fluctuation_exponents, FluctuationFit};
use crate::analysis::SampleStats;
use crate::circuit::Boundary;
use crate::error::{param, Result};

/// Law of the site energies.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Disorder {
    /// Uniform on `[0, 1]`.
    #[default]
    Uniform,
    /// Exponential with unit mean.
    Exponential,
    /// Every site has the same energy.
    Constant(f64),
}

impl Disorder {
    fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Disorder::Uniform => rng.random::<f64>(),
            Disorder::Exponential => Exp1.sample(rng),
            Disorder::Constant(e) => e,
        }
    }

    pub fn mean(self) -> f64 {
        match self {
            Disorder::Uniform => 0.5,
            Disorder::Exponential => 1.0,
            Disorder::Constant(e) => e,
        }
    }
}

/// Optimal point-to-line polymer.
#[derive(Debug, Clone, PartialEq)]
pub struct DprmPath {
    pub energy: f64,
    /// Column of the polymer in each row, bottom first.
    pub path: Vec<usize>,
}

/// Ground state of a polymer of `height` sites starting at the centre column
/// of a lattice of `width` columns, with a free top end. Ties prefer the
/// vertical step, then the left one; the endpoint closest to the start wins
/// ties.
pub fn dprm_ground_state<R: Rng + ?Sized>(
    width: usize,
    height: usize,
    disorder: Disorder,
    boundary: Boundary,
    rng: &mut R,
) -> Result<DprmPath> {
    if width == 0 || height == 0 {
        return Err(param("polymer lattice must be nonempty"));
    }
    let energies: Vec<Vec<f64>> = (0..height).map(|_| (0..width).map(|_| disorder.sample(rng)).collect()).collect();
    let x0 = width / 2;
    let mut f = vec![f64::INFINITY; width];
    f[x0] = energies[0][x0];
    // from[h][x]: column in row h−1 the optimum came from.
    let mut from = vec![vec![0usize; width]; height];
    for h in 1..height {
        let mut g = vec![f64::INFINITY; width];
        for x in 0..width {
            let mut best = (f64::INFINITY, x);
            for dx in [0i64, -1, 1] {
                let Some(src) = neighbour(x, dx, width, boundary) else { continue };
                if f[src] < best.0 {
                    best = (f[src], src);
                }
            }
            g[x] = best.0 + energies[h][x];
            from[h][x] = best.1;
        }
        f = g;
    }
    let (mut x, energy) = f
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.abs_diff(x0).cmp(&b.0.abs_diff(x0))))
        .map(|(i, &v)| (i, v))
        .expect("nonempty");
    let mut path = vec![0; height];
    for h in (0..height).rev() {
        path[h] = x;
        x = from[h][x];
    }
    Ok(DprmPath { energy, path })
}

fn neighbour(x: usize, dx: i64, width: usize, boundary: Boundary) -> Option<usize> {
    let y = x as i64 + dx;
    match boundary {
        Boundary::Open => (0..width as i64).contains(&y).then_some(y as usize),
        Boundary::Periodic => Some(y.rem_euclid(width as i64) as usize),
    }
}

/// Energy and endpoint statistics of point-to-line polymers.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DprmScaling {
    pub heights: Vec<usize>,
    pub energy_mean: Vec<f64>,
    pub energy_std: Vec<f64>,
    pub wander_std: Vec<f64>,
    pub beta: f64,
    pub beta_err: f64,
    pub zeta: f64,
    pub zeta_err: f64,
}

fn check_strip(width: usize, heights: &[usize]) -> Result<()> {
    if heights.len() < 2 || heights.windows(2).any(|w| w[1] <= w[0]) || heights[0] == 0 {
        return Err(param("heights must be positive and strictly increasing, at least two"));
    }
    if width < 3 {
        return Err(param("strip must have at least three columns"));
    }
    Ok(())
}

/// DP rows of a point-to-line polymer on a periodic strip.
struct Strip {
    f: Vec<f64>,
    g: Vec<f64>,
}

impl Strip {
    fn new(width: usize) -> Self {
        Self { f: vec![f64::INFINITY; width], g: vec![f64::INFINITY; width] }
    }

    /// Grows one polymer from the centre column and calls `visit(k, energy,
    /// displacement)` at `heights[k]`.
    fn sample<R: Rng + ?Sized>(&mut self, heights: &[usize], disorder: Disorder, rng: &mut R, mut visit: impl FnMut(usize, f64, i64)) {
        let Self { f, g } = self;
        let width = f.len();
        let top = *heights.last().expect("nonempty");
        let x0 = width / 2;
        f.fill(f64::INFINITY);
        g.fill(f64::INFINITY);
        f[x0] = disorder.sample(rng);
        let mut next = 0;
        for h in 1..=top {
            if h == heights[next] {
                let (x, e) = f
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.abs_diff(x0).cmp(&b.0.abs_diff(x0))))
                    .map(|(i, &v)| (i, v))
                    .expect("nonempty");
                visit(next, e, x as i64 - x0 as i64);
                next += 1;
                if next == heights.len() {
                    break;
                }
            }
            if h + 1 > x0 || x0 + h + 1 >= width {
                for x in 0..width {
                    let l = f[(x + width - 1) % width];
                    let r = f[(x + 1) % width];
                    g[x] = f[x].min(l).min(r) + disorder.sample(rng);
                }
            } else {
                for x in x0 - h..=x0 + h {
                    g[x] = f[x].min(f[x - 1]).min(f[x + 1]) + disorder.sample(rng);
                }
            }
            std::mem::swap(f, g);
        }
    }
}

/// Ground-state energy and end displacement of one sampled polymer at each
/// height; the same geometry and draws as one sample of [`dprm_scaling`].
pub fn dprm_sample<R: Rng + ?Sized>(width: usize, heights: &[usize], disorder: Disorder, rng: &mut R) -> Result<Vec<(f64, i64)>> {
    check_strip(width, heights)?;
    let mut out = Vec::with_capacity(heights.len());
    Strip::new(width).sample(heights, disorder, rng, |_, e, x| out.push((e, x)));
    Ok(out)
}

/// Samples polymers on a periodic strip of `width` columns and records, at
/// each height in `heights` (ascending), the ground-state energy and the
/// displacement of its free end. Only the light cone of the start is
/// updated, so the strip must be wide compared with the wandering.
pub fn dprm_scaling<R: Rng + ?Sized>(
    width: usize,
    heights: &[usize],
    samples: usize,
    disorder: Disorder,
    rng: &mut R,
) -> Result<DprmScaling> {
    if samples < 10 {
        return Err(param(format!("{samples} samples are too few for fluctuation exponents")));
    }
    check_strip(width, heights)?;
    let mut energy = vec![Vec::with_capacity(samples); heights.len()];
    let mut wander = vec![Vec::with_capacity(samples); heights.len()];
    let mut buf = Strip::new(width);
    for _ in 0..samples {
        buf.sample(heights, disorder, rng, |k, e, x| {
            energy[k].push(e);
            wander[k].push(x as f64);
        });
    }
    let times: Vec<f64> = heights.iter().map(|&h| h as f64).collect();
    let energy_mean = energy.iter().map(|e| e.iter().sum::<f64>() / e.len() as f64).collect();
    if let Disorder::Constant(_) = disorder {
        // No fluctuations to fit.
        let std = |v: &[Vec<f64>]| v.iter().map(|x| SampleStats::from_samples(x).std).collect();
        return Ok(DprmScaling {
            heights: heights.to_vec(),
            energy_mean,
            energy_std: std(&energy),
            wander_std: std(&wander),
            beta: 0.0,
            beta_err: 0.0,
            zeta: 0.0,
            zeta_err: 0.0,
        });
    }
    let FluctuationFit { cost_std: cs, wander_std: ws, beta, beta_err, zeta, zeta_err } = fluctuation_exponents(&times, &energy, &wander)?;
    Ok(DprmScaling {
        heights: heights.to_vec(),
        energy_mean,
        energy_std: cs,
        wander_std: ws,
        beta,
        beta_err,
        zeta,
        zeta_err,
    })
}
