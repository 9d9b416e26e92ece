//! Event-driven minimal cuts through rate-1 Poisson circuits.
//!
//! `h[g]` is the cheapest cut (in bonds) from gap `g` at the current time
//! down to the bottom boundary condition. A gate on the bond straddling gap
//! `g` blocks descent there, so `h[g] ← min(h[g−1], h[g+1]) + 1`; no other
//! entry changes.

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::analysis::{linear_least_squares, powerlaw_fit, SampleStats, Series};
use crate::circuit::Boundary;
use crate::error::{param, Error, Result};

/// Cut profile over the gaps of a chain, evolved in continuous time.
#[derive(Debug, Clone)]
pub struct CutProfile {
    boundary: Boundary,
    h: Vec<u32>,
    /// Transverse displacement of the cut's bottom endpoint from each gap.
    disp: Vec<i64>,
    time: f64,
}

impl CutProfile {
    /// Open chain of `n` sites, cut pinned to gap `x0` at the bottom.
    pub fn point(n: usize, x0: usize) -> Result<Self> {
        if x0 > n || n < 2 {
            return Err(Error::InvalidGeometry(format!("gap {x0} on a chain of {n} sites")));
        }
        let h = (0..=n).map(|g| g.abs_diff(x0) as u32).collect();
        Ok(Self { boundary: Boundary::Open, h, disp: vec![0; n + 1], time: 0.0 })
    }

    /// Free bottom boundary (product initial state).
    pub fn flat(n: usize, boundary: Boundary) -> Result<Self> {
        let gaps = match boundary {
            Boundary::Open if n >= 2 => n + 1,
            Boundary::Periodic if n >= 3 => n,
            _ => return Err(Error::InvalidGeometry(format!("too few sites ({n})"))),
        };
        Ok(Self { boundary, h: vec![0; gaps], disp: vec![0; gaps], time: 0.0 })
    }

    pub fn heights(&self) -> &[u32] {
        &self.h
    }

    pub fn displacements(&self) -> &[i64] {
        &self.disp
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    fn sites(&self) -> usize {
        match self.boundary {
            Boundary::Open => self.h.len() - 1,
            Boundary::Periodic => self.h.len(),
        }
    }

    fn bonds(&self) -> usize {
        match self.boundary {
            Boundary::Open => self.sites() - 1,
            Boundary::Periodic => self.sites(),
        }
    }

    /// Applies a gate on bond `b` (sites `b`, `b+1`). Ties between the two
    /// neighbours are broken by a fair coin.
    pub fn gate<R: Rng + ?Sized>(&mut self, b: usize, rng: &mut R) {
        let m = self.h.len();
        let g = (b + 1) % m;
        let (l, r) = ((g + m - 1) % m, (g + 1) % m);
        let take_left = match self.h[l].cmp(&self.h[r]) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => rng.random::<bool>(),
        };
        if take_left {
            self.h[g] = self.h[l] + 1;
            self.disp[g] = self.disp[l] + 1;
        } else {
            self.h[g] = self.h[r] + 1;
            self.disp[g] = self.disp[r] - 1;
        }
    }

    /// Runs rate-`rate` Poisson gates on every bond until time `until`.
    /// Superposed processes are sampled as one clock with uniform bonds.
    pub fn advance<R: Rng + ?Sized>(&mut self, until: f64, rate: f64, rng: &mut R) -> Result<()> {
        let bonds = self.bonds();
        let clock = Exp::new(rate * bonds as f64).map_err(|e| param(e.to_string()))?;
        loop {
            let next = self.time + clock.sample(rng);
            if next > until {
                // Memorylessness lets the next call resample from `until`.
                self.time = until;
                return Ok(());
            }
            self.time = next;
            let b = rng.random_range(0..bonds);
            self.gate(b, rng);
        }
    }
}

/// Line-tension estimate at one endpoint slope.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LineTension {
    pub v: f64,
    /// Extrapolated cost per unit time, in units of `ln q`.
    pub e: f64,
    pub err: f64,
}

/// Quadratic fit `E(v) = E(0) + c v²`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TensionFit {
    pub e0: f64,
    pub e0_err: f64,
    pub quad: f64,
    pub quad_err: f64,
}

impl TensionFit {
    pub fn from_estimates(points: &[LineTension], v_max: f64) -> Result<Self> {
        let pts: Vec<&LineTension> = points.iter().filter(|p| p.v.abs() <= v_max + 1e-12).collect();
        let design: Vec<Vec<f64>> = pts.iter().map(|p| vec![1.0, p.v * p.v]).collect();
        let y: Vec<f64> = pts.iter().map(|p| p.e).collect();
        let sig: Vec<f64> = pts.iter().map(|p| p.err).collect();
        let weighted = sig.iter().all(|&s| s > 0.0);
        let fit = linear_least_squares(&design, &y, weighted.then_some(sig.as_slice()))?;
        Ok(Self { e0: fit.coef[0], e0_err: fit.err(0), quad: fit.coef[1], quad_err: fit.err(1) })
    }
}

/// Cut cost per unit time `C(v, T)/T` of one sample at each slope.
///
/// An open chain of `2T + 16` sites is evolved for time `T` with the cut
/// pinned at its centre `x0`; the cost at gap `x0 + round(vT)` gives
/// `C(v, T)`.
pub fn point_cut_sample<R: Rng + ?Sized>(duration: usize, velocities: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    if duration == 0 {
        return Err(param("durations must be positive"));
    }
    if let Some(v) = velocities.iter().find(|v| !(v.abs() <= 1.0)) {
        return Err(param(format!("slope {v} outside the light cone")));
    }
    let t = duration as f64;
    let n = 2 * duration + 16;
    let x0 = n / 2;
    let mut prof = CutProfile::point(n, x0)?;
    prof.advance(t, 1.0, rng)?;
    Ok(velocities.iter().map(|v| prof.h[(x0 as f64 + v * t).round() as usize] as f64 / t).collect())
}

/// Extrapolates `C/T = E + b T^{−2/3}` to `T → ∞` from per-duration sample
/// statistics at one slope. With a single duration the mean is returned.
pub fn extrapolate_tension(v: f64, durations: &[usize], stats: &[SampleStats]) -> Result<LineTension> {
    if durations.is_empty() || durations.len() != stats.len() {
        return Err(param("need one statistic per duration"));
    }
    if durations.len() == 1 {
        return Ok(LineTension { v, e: stats[0].mean, err: stats[0].stderr });
    }
    let design: Vec<Vec<f64>> = durations.iter().map(|&t| vec![1.0, (t as f64).powf(-2.0 / 3.0)]).collect();
    let y: Vec<f64> = stats.iter().map(|s| s.mean).collect();
    let sig: Vec<f64> = stats.iter().map(|s| s.stderr.max(1e-12)).collect();
    let fit = linear_least_squares(&design, &y, Some(&sig))?;
    Ok(LineTension { v, e: fit.coef[0], err: fit.err(0) })
}

/// Mean point-to-point cut cost per unit time at slopes `velocities`, from
/// [`point_cut_sample`] at every duration, extrapolated with
/// [`extrapolate_tension`].
pub fn line_tension_estimate<R: Rng + ?Sized>(
    durations: &[usize],
    velocities: &[f64],
    samples: usize,
    rng: &mut R,
) -> Result<Vec<LineTension>> {
    if durations.is_empty() || samples < 2 {
        return Err(param("line tension needs at least one duration and two samples"));
    }
    // per_t[k][j]: stats of C/T at duration k, slope j.
    let mut per_t = Vec::with_capacity(durations.len());
    for &t in durations {
        let mut costs = vec![Vec::with_capacity(samples); velocities.len()];
        for _ in 0..samples {
            for (c, x) in costs.iter_mut().zip(point_cut_sample(t, velocities, rng)?) {
                c.push(x);
            }
        }
        per_t.push(costs.iter().map(|c| SampleStats::from_samples(c)).collect::<Vec<_>>());
    }
    velocities
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let stats: Vec<SampleStats> = per_t.iter().map(|s| s[j]).collect();
            extrapolate_tension(v, durations, &stats)
        })
        .collect()
}

/// Fluctuation and wandering exponents with the data behind them.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KpzExponents {
    pub times: Vec<f64>,
    /// Standard deviation of the cut cost across samples.
    pub cost_std: Vec<f64>,
    /// Standard deviation of the endpoint displacement.
    pub wander_std: Vec<f64>,
    pub beta: f64,
    pub beta_err: f64,
    pub zeta: f64,
    pub zeta_err: f64,
}

/// Standard deviation with a bootstrap-free error estimate,
/// `σ/√(2(n−1))` for near-Gaussian samples.
fn std_with_err(xs: &[f64]) -> (f64, f64) {
    let s = SampleStats::from_samples(xs);
    (s.std, s.std / (2.0 * (xs.len() as f64 - 1.0)).sqrt())
}

/// Spreads of a cost and of an endpoint across samples, and the power-law
/// exponents fitted to them.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FluctuationFit {
    pub cost_std: Vec<f64>,
    pub wander_std: Vec<f64>,
    pub beta: f64,
    pub beta_err: f64,
    pub zeta: f64,
    pub zeta_err: f64,
}

/// Fits `std(cost) ~ t^β` and `std(wander) ~ t^ζ` over all `times`;
/// `cost[k]` and `wander[k]` hold the samples at `times[k]`.
pub fn fluctuation_exponents(times: &[f64], cost: &[Vec<f64>], wander: &[Vec<f64>]) -> Result<FluctuationFit> {
    let n = times.len();
    if n < 2 || cost.len() != n || wander.len() != n {
        return Err(param("need samples at two or more times"));
    }
    let (cs, ce): (Vec<f64>, Vec<f64>) = cost.iter().map(|c| std_with_err(c)).unzip();
    let (ws, we): (Vec<f64>, Vec<f64>) = wander.iter().map(|c| std_with_err(c)).unzip();
    let window = (times[0], times[n - 1]);
    let series = |y: &[f64], e: &[f64]| Series::new(times.to_vec(), y.to_vec(), e.to_vec(), vec![cost[0].len(); n], Default::default());
    let b = powerlaw_fit(&series(&cs, &ce)?, window)?;
    let z = powerlaw_fit(&series(&ws, &we)?, window)?;
    Ok(FluctuationFit {
        cost_std: cs,
        wander_std: ws,
        beta: b.exponent,
        beta_err: b.exponent_err,
        zeta: z.exponent,
        zeta_err: z.exponent_err,
    })
}

/// β from the spread of the point-to-line cut cost at the centre of a ring
/// of `n` sites, ζ from the spread of its bottom endpoint, at each time in
/// `times` (ascending). With `disorder = false` gates act as a regular
/// brickwork at integer and half-integer times, giving a zero-fluctuation
/// control.
pub fn kpz_exponents<R: Rng + ?Sized>(
    n: usize,
    times: &[f64],
    samples: usize,
    disorder: bool,
    rng: &mut R,
) -> Result<KpzExponents> {
    if samples < 10 {
        return Err(param(format!("{samples} samples are too few for fluctuation exponents")));
    }
    if times.len() < 2 || times.windows(2).any(|w| w[1] <= w[0]) || times[0] <= 0.0 {
        return Err(param("times must be positive and strictly increasing, at least two"));
    }
    if n % 2 == 1 {
        return Err(Error::InvalidGeometry("ring needs an even number of sites".into()));
    }
    let centre = n / 2;
    let mut cost = vec![Vec::with_capacity(samples); times.len()];
    let mut wander = vec![Vec::with_capacity(samples); times.len()];
    for _ in 0..samples {
        let mut prof = CutProfile::flat(n, Boundary::Periodic)?;
        let mut layer = 0usize;
        for (k, &t) in times.iter().enumerate() {
            if disorder {
                prof.advance(t, 1.0, rng)?;
            } else {
                while (layer + 1) as f64 * 0.5 <= t {
                    layer += 1;
                    let start = layer % 2;
                    for b in (start..n).step_by(2) {
                        prof.gate(b, rng);
                    }
                }
            }
            cost[k].push(prof.h[centre] as f64);
            wander[k].push(prof.disp[centre] as f64);
        }
    }
    if !disorder {
        let (cs, ws) = (cost.iter().map(|c| std_with_err(c).0).collect(), wander.iter().map(|c| std_with_err(c).0).collect());
        return Ok(KpzExponents { times: times.to_vec(), cost_std: cs, wander_std: ws, beta: 0.0, beta_err: 0.0, zeta: 0.0, zeta_err: 0.0 });
    }
    let FluctuationFit { cost_std: cs, wander_std: ws, beta, beta_err, zeta, zeta_err } = fluctuation_exponents(times, &cost, &wander)?;
    Ok(KpzExponents { times: times.to_vec(), cost_std: cs, wander_std: ws, beta, beta_err, zeta, zeta_err })
}
