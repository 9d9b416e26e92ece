//! Coarse-grained membrane: minimize `s_eq ∫ E(ẋ) dt + S₀(x₀)` over
//! trajectories ending at the top point, by dynamic programming on a
//! space-time grid.

use std::fmt;
use std::sync::Arc;

use crate::error::{param, Error, Result};

/// Number of velocities in the DP.
pub const VELOCITY_POINTS: usize = 81;

type Tension = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Line tension `E(v)` with an equilibrium entropy density.
#[derive(Clone)]
pub struct MembraneModel {
    tension: Tension,
    s_eq: f64,
    v_max: f64,
}

impl fmt::Debug for MembraneModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MembraneModel").field("s_eq", &self.s_eq).field("v_max", &self.v_max).finish()
    }
}

/// Discretization of the DP.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MembraneGrid {
    pub dt: f64,
    pub dx: f64,
    /// Combine the result with one at half spacing, `2 S_{h/2} − S_h`.
    pub richardson: bool,
}

impl Default for MembraneGrid {
    fn default() -> Self {
        Self { dt: 0.25, dx: 0.25, richardson: true }
    }
}

impl MembraneGrid {
    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dx > 0.0 && self.dt.is_finite() && self.dx.is_finite()) {
            return Err(param(format!("grid spacings must be positive, got dt={} dx={}", self.dt, self.dx)));
        }
        Ok(())
    }

    fn halved(&self) -> Self {
        Self { dt: self.dt / 2.0, dx: self.dx / 2.0, richardson: false }
    }
}

impl MembraneModel {
    /// Rejects tensions that are not convex on the velocity grid.
    pub fn new(tension: impl Fn(f64) -> f64 + Send + Sync + 'static, s_eq: f64, v_max: f64) -> Result<Self> {
        if !(s_eq > 0.0 && s_eq.is_finite() && v_max > 0.0 && v_max.is_finite()) {
            return Err(param(format!("need s_eq > 0 and v_max > 0, got {s_eq}, {v_max}")));
        }
        let m = Self { tension: Arc::new(tension), s_eq, v_max };
        let vs = m.velocities();
        let e: Vec<f64> = vs.iter().map(|&v| m.tension(v)).collect();
        if let Some(i) = e.iter().position(|x| !x.is_finite()) {
            return Err(param(format!("E({}) is not finite", vs[i])));
        }
        for i in 1..vs.len() - 1 {
            let curv = e[i - 1] - 2.0 * e[i] + e[i + 1];
            if curv < -1e-12 * (1.0 + e[i].abs()) {
                return Err(Error::NonConvexTension { v: vs[i] });
            }
        }
        Ok(m)
    }

    /// `E(v) = (1 + v²)/2` inside the light cone, `|v|` outside.
    pub fn random_circuit(s_eq: f64) -> Self {
        Self::new(|v: f64| if v.abs() <= 1.0 { 0.5 * (1.0 + v * v) } else { v.abs() }, s_eq, 1.0)
            .expect("convex by construction")
    }

    /// `E(v) = |v|`: free horizontal transport inside the cone.
    pub fn cone(s_eq: f64) -> Self {
        Self::new(f64::abs, s_eq, 1.0).expect("convex by construction")
    }

    pub fn tension(&self, v: f64) -> f64 {
        (self.tension)(v)
    }

    pub fn s_eq(&self) -> f64 {
        self.s_eq
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn v_e(&self) -> f64 {
        self.tension(0.0)
    }

    /// Smallest positive `v ≤ v_max` with `E(v) = v` to 1e-9, scanned on a
    /// grid of 10⁵ points.
    pub fn v_b(&self) -> Option<f64> {
        let n = 100_000;
        (1..=n).map(|k| self.v_max * k as f64 / n as f64).find(|&v| (self.tension(v) - v).abs() < 1e-9)
    }

    fn velocities(&self) -> Vec<f64> {
        let k = (VELOCITY_POINTS - 1) as f64;
        (0..VELOCITY_POINTS).map(|i| -self.v_max + 2.0 * self.v_max * i as f64 / k).collect()
    }

    /// Entropy at the top point `y` after time `t` from the initial profile
    /// `s0`.
    pub fn entropy(&self, s0: &dyn Fn(f64) -> f64, y: f64, t: f64, grid: &MembraneGrid) -> Result<f64> {
        grid.validate()?;
        let coarse = self.entropy_once(s0, y, t, grid)?;
        if !grid.richardson {
            return Ok(coarse);
        }
        let fine = self.entropy_once(s0, y, t, &grid.halved())?;
        Ok(2.0 * fine - coarse)
    }

    /// Entropy of the interval `[y1, y2]` after time `t` from a product
    /// state: the cheaper of two independent membranes and one joined
    /// membrane hanging from both endpoints.
    pub fn region_entropy(&self, y1: f64, y2: f64, t: f64, grid: &MembraneGrid) -> Result<f64> {
        grid.validate()?;
        let coarse = self.region_once(y1, y2, t, grid)?;
        if !grid.richardson {
            return Ok(coarse);
        }
        let fine = self.region_once(y1, y2, t, &grid.halved())?;
        Ok(2.0 * fine - coarse)
    }

    fn entropy_once(&self, s0: &dyn Fn(f64) -> f64, y: f64, t: f64, grid: &MembraneGrid) -> Result<f64> {
        let steps = Self::steps(t, grid)?;
        let dt = t / steps as f64;
        let (xs, y_index) = self.spatial_grid(y, t, grid.dx);
        let mut s: Vec<f64> = xs.iter().map(|&x| s0(x)).collect();
        for _ in 0..steps {
            s = self.relax_step(&xs, &s, dt, 1.0, grid.dx);
        }
        let out = s[y_index];
        if !out.is_finite() {
            return Err(Error::NumericalDegeneracy("membrane DP did not reach the top point".into()));
        }
        Ok(out)
    }

    fn region_once(&self, y1: f64, y2: f64, t: f64, grid: &MembraneGrid) -> Result<f64> {
        let (a, b) = (y1.min(y2), y1.max(y2));
        let apart = self.entropy_once(&|_| 0.0, a, t, grid)? + self.entropy_once(&|_| 0.0, b, t, grid)?;
        let steps = Self::steps(t, grid)?;
        let dt = t / steps as f64;
        let centre = 0.5 * (a + b);
        let (xs, _) = self.spatial_grid(centre, 0.5 * (b - a) + t, grid.dx);
        let point = |y: f64| -> Vec<f64> {
            let k = xs.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &x)| {
                if (x - y).abs() < acc.1 {
                    (i, (x - y).abs())
                } else {
                    acc
                }
            });
            let mut v = vec![f64::INFINITY; xs.len()];
            v[k.0] = 0.0;
            v
        };
        // Costs from each top endpoint down to (x, t − τ). Going down with
        // forward velocity v moves the point by −v dt.
        let (mut da, mut db) = (point(a), point(b));
        let mut joined = f64::INFINITY;
        for _ in 0..steps {
            da = self.relax_step(&xs, &da, dt, -1.0, grid.dx);
            db = self.relax_step(&xs, &db, dt, -1.0, grid.dx);
            joined = da.iter().zip(&db).map(|(p, q)| p + q).fold(joined, f64::min);
        }
        Ok(apart.min(joined))
    }

    fn steps(t: f64, grid: &MembraneGrid) -> Result<usize> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(param(format!("time must be nonnegative, got {t}")));
        }
        Ok((t / grid.dt).ceil().max(1.0) as usize)
    }

    /// Grid of spacing `dx` covering `y ± v_max·reach`, with `y` on it.
    fn spatial_grid(&self, y: f64, reach: f64, dx: f64) -> (Vec<f64>, usize) {
        let half = ((self.v_max * reach) / dx).ceil() as usize + 2;
        let xs = (0..=2 * half).map(|i| y + (i as f64 - half as f64) * dx).collect();
        (xs, half)
    }

    /// One DP step `S'(x) = min_v [s_eq dt E(v) + S(x − sign·v dt)]` with
    /// linear interpolation; points outside the grid are unreachable.
    fn relax_step(&self, xs: &[f64], s: &[f64], dt: f64, sign: f64, dx: f64) -> Vec<f64> {
        let x0 = xs[0];
        let n = xs.len();
        let vs = self.velocities();
        let costs: Vec<f64> = vs.iter().map(|&v| self.s_eq * dt * self.tension(v)).collect();
        xs.iter()
            .map(|&x| {
                vs.iter()
                    .zip(&costs)
                    .map(|(&v, &c)| {
                        let u = (x - sign * v * dt - x0) / dx;
                        let i = u.floor();
                        if i < 0.0 || i as usize >= n {
                            return f64::INFINITY;
                        }
                        let i = i as usize;
                        let w = u - i as f64;
                        let val = if w < 1e-12 {
                            s[i]
                        } else if i + 1 >= n {
                            f64::INFINITY
                        } else if w > 1.0 - 1e-12 {
                            s[i + 1]
                        } else {
                            s[i] * (1.0 - w) + s[i + 1] * w
                        };
                        c + val
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }
}
