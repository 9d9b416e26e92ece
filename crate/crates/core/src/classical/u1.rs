//! Haar-averaged spreading of a conserved U(1) charge: every gate replaces
//! the amplitudes on its two sites by their mean.

use crate::circuit::{brickwork_pairs, Boundary};
use crate::error::{Error, Result};

/// Deterministic amplitude iteration under brickwork gates.
#[derive(Debug, Clone, PartialEq)]
pub struct U1Diffusion {
    amps: Vec<f64>,
    boundary: Boundary,
    layer: usize,
}

impl U1Diffusion {
    pub fn new(n: usize, x0: usize, boundary: Boundary) -> Result<Self> {
        if x0 >= n {
            return Err(Error::InvalidGeometry(format!("site {x0} outside chain of {n}")));
        }
        brickwork_pairs(n, 1, boundary)?;
        let mut amps = vec![0.0; n];
        amps[x0] = 1.0;
        Ok(Self { amps, boundary, layer: 0 })
    }

    /// Applies the next brickwork layer.
    pub fn step(&mut self) {
        self.layer += 1;
        let n = self.amps.len();
        let start = if self.layer % 2 == 1 { 0 } else { 1 };
        let mut a = start;
        while a + 1 < n {
            let m = 0.5 * (self.amps[a] + self.amps[a + 1]);
            self.amps[a] = m;
            self.amps[a + 1] = m;
            a += 2;
        }
        if self.boundary == Boundary::Periodic && start == 1 && n > 2 {
            let m = 0.5 * (self.amps[n - 1] + self.amps[0]);
            self.amps[n - 1] = m;
            self.amps[0] = m;
        }
    }

    pub fn layer(&self) -> usize {
        self.layer
    }

    pub fn profile(&self) -> &[f64] {
        &self.amps
    }
}

/// Profiles `a_x(t)` for `t = 0..=t_max`.
pub fn u1_amplitude_diffusion(n: usize, t_max: usize, x0: usize, boundary: Boundary) -> Result<Vec<Vec<f64>>> {
    let mut d = U1Diffusion::new(n, x0, boundary)?;
    let mut out = Vec::with_capacity(t_max + 1);
    out.push(d.profile().to_vec());
    for _ in 0..t_max {
        d.step();
        out.push(d.profile().to_vec());
    }
    Ok(out)
}

/// `w^c(t) = Σ_x a_x(t)²` for each profile.
pub fn u1_conserved_weight(profiles: &[Vec<f64>]) -> Vec<f64> {
    profiles.iter().map(|a| a.iter().map(|x| x * x).sum()).collect()
}
