//! Spectral form factor `K(t) = |Tr W^t|²` from eigenphases.

use rand::Rng;

use super::kernel::apply_local;
use crate::circuit::{build_brickwork, haar_unitary, Boundary, Circuit, Event, GateEnsemble};
use crate::error::{Error, Result};
use crate::linalg::{unitary_eigenphases, CMatrix, C64, ZERO};

/// Largest Hilbert-space dimension diagonalized.
pub const SFF_DIM_CAP: usize = 1 << 12;

/// Where the Floquet unitaries come from.
#[derive(Debug, Clone)]
pub enum SffSource {
    /// Haar-random (CUE) matrices of the given dimension.
    Cue { dim: usize },
    /// A single fixed unitary; averaging is then trivial.
    Fixed(CMatrix),
    /// One period = two brickwork layers with gates drawn from `ensemble`.
    Floquet { n: usize, boundary: Boundary, ensemble: GateEnsemble },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SffSeries {
    /// `K̄(t)` for `t = 0..=t_max`.
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub samples: usize,
}

pub fn spectral_form_factor(phases: &[f64], t: usize) -> f64 {
    let tf = t as f64;
    let (re, im) = phases.iter().fold((0.0, 0.0), |(re, im), th| {
        let (s, c) = (tf * th).sin_cos();
        (re + c, im + s)
    });
    re * re + im * im
}

/// Dense unitary of a gate-only qubit circuit (columns are images of basis
/// states).
pub fn floquet_unitary(circuit: &Circuit) -> Result<CMatrix> {
    let n = circuit.n_sites;
    let dim = circuit.q.pow(n as u32);
    if dim > SFF_DIM_CAP {
        return Err(Error::CapExceeded { what: "Floquet dimension", size: dim, cap: SFF_DIM_CAP });
    }
    let mut u = CMatrix::zeros(dim);
    let mut col = vec![ZERO; dim];
    for j in 0..dim {
        col.iter_mut().for_each(|z| *z = ZERO);
        col[j] = C64::new(1.0, 0.0);
        for e in circuit.events() {
            match e {
                Event::Gate { sites, gate } => apply_local(&mut col, n, circuit.q, gate.dense(), sites),
                Event::Measure { .. } => {
                    return Err(Error::InvalidParameter("Floquet operator needs a unitary circuit".into()))
                }
            }
        }
        for (i, z) in col.iter().enumerate() {
            u.set(i, j, *z);
        }
    }
    Ok(u)
}

fn sample_phases<R: Rng + ?Sized>(source: &SffSource, rng: &mut R) -> Result<Vec<f64>> {
    match source {
        SffSource::Cue { dim } => unitary_eigenphases(&haar_unitary(*dim, rng)),
        SffSource::Fixed(w) => unitary_eigenphases(w),
        SffSource::Floquet { n, boundary, ensemble } => {
            let c = build_brickwork(*n, 2, *boundary, ensemble, rng)?;
            unitary_eigenphases(&floquet_unitary(&c)?)
        }
    }
}

/// Ensemble-averaged `K̄(t)` for `t = 0..=t_max`.
pub fn sff<R: Rng + ?Sized>(source: &SffSource, t_max: usize, samples: usize, rng: &mut R) -> Result<SffSeries> {
    let dim = match source {
        SffSource::Cue { dim } => *dim,
        SffSource::Fixed(w) => w.dim(),
        SffSource::Floquet { n, ensemble, .. } => ensemble.q().saturating_pow(*n as u32),
    };
    if dim > SFF_DIM_CAP {
        return Err(Error::CapExceeded { what: "Floquet dimension", size: dim, cap: SFF_DIM_CAP });
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let mut sum = vec![0.0; t_max + 1];
    let mut sum_sq = vec![0.0; t_max + 1];
    for _ in 0..samples {
        let phases = sample_phases(source, rng)?;
        for t in 0..=t_max {
            let k = spectral_form_factor(&phases, t);
            sum[t] += k;
            sum_sq[t] += k * k;
        }
    }
    let m = samples as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / m).collect();
    let stderr = sum_sq
        .iter()
        .zip(&mean)
        .map(|(s2, mu)| if samples > 1 { ((s2 / m - mu * mu).max(0.0) * m / (m - 1.0) / m).sqrt() } else { 0.0 })
        .collect();
    Ok(SffSeries { mean, stderr, samples })
}
