//! Exact dense simulation of pure states on small chains.

mod entropy;
mod kernel;
mod operator;
mod sff;

use rand::Rng;

pub use entropy::{entropy, entropy_from_spectrum, haar_mean_purity, mutual_information, purity, schmidt_spectrum, EntropyResult, Renyi};
pub use operator::{
    ensemble_otoc, ensemble_two_point, heisenberg_evolve, otoc, pauli_weights, two_point, CorrelatorStats,
    HeisenbergOperator, PauliWeights, DENSE_OPERATOR_CAP,
};
pub use sff::{floquet_unitary, sff, spectral_form_factor, SffSeries, SffSource, SFF_DIM_CAP};

use crate::circuit::{named, Circuit, Event, Gate, UNITARY_TOL};
use crate::error::{param, Error, Result};
use crate::linalg::{CMatrix, C64, ONE, ZERO};
use crate::pauli::Pauli;

/// Born probabilities below this are treated as impossible.
pub const BORN_FLOOR: f64 = 1e-12;

/// Normalized pure state of `n` sites of dimension `q`; site 0 is the most
/// significant digit of the amplitude index.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n: usize,
    q: usize,
    amps: Vec<C64>,
}

/// Result of one projective measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub site: usize,
    pub basis: Pauli,
    /// +1 or −1.
    pub outcome: i8,
    pub probability: f64,
}

/// Outcomes of a monitored run and the log-probability of the trajectory.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryRecord {
    pub outcomes: Vec<(usize, Measurement)>,
    pub log_prob: f64,
}

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

impl PureState {
    /// Tensor product of normalized local kets, one per site.
    pub fn product(n: usize, q: usize, kets: &[Vec<C64>]) -> Result<Self> {
        if kets.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: kets.len() });
        }
        let mut amps = vec![ONE];
        for k in kets {
            if k.len() != q {
                return Err(Error::DimensionMismatch { expected: q, got: k.len() });
            }
            if (norm_sqr(k) - 1.0).abs() > 1e-10 {
                return Err(param("local kets must be normalized"));
            }
            amps = amps.iter().flat_map(|a| k.iter().map(move |b| a * b)).collect();
        }
        Ok(Self { n, q, amps })
    }

    /// Computational basis state with the given digits.
    pub fn basis(n: usize, q: usize, digits: &[usize]) -> Result<Self> {
        if digits.len() != n || digits.iter().any(|&d| d >= q) {
            return Err(param("basis digits must match the chain"));
        }
        let mut amps = vec![ZERO; q.pow(n as u32)];
        amps[digits.iter().fold(0, |acc, &d| acc * q + d)] = ONE;
        Ok(Self { n, q, amps })
    }

    /// All spins up (Z = +1).
    pub fn all_up(n: usize) -> Self {
        Self::basis(n, 2, &vec![0; n]).expect("qubit chain")
    }

    pub fn from_amplitudes(n: usize, q: usize, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != q.pow(n as u32) {
            return Err(Error::DimensionMismatch { expected: q.pow(n as u32), got: amps.len() });
        }
        if (norm_sqr(&amps) - 1.0).abs() > 1e-10 {
            return Err(param("amplitudes must be normalized"));
        }
        Ok(Self { n, q, amps })
    }

    /// Haar-random pure state.
    pub fn haar_random<R: Rng + ?Sized>(n: usize, q: usize, rng: &mut R) -> Self {
        let mut amps: Vec<C64> = (0..q.pow(n as u32))
            .map(|_| C64::new(rng.sample(rand_distr::StandardNormal), rng.sample(rand_distr::StandardNormal)))
            .collect();
        let norm = norm_sqr(&amps).sqrt();
        amps.iter_mut().for_each(|z| *z /= norm);
        Self { n, q, amps }
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// `|⟨self|other⟩|`.
    pub fn overlap(&self, other: &PureState) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum::<C64>().norm()
    }

    fn check_sites(&self, sites: &[usize]) -> Result<()> {
        for (i, &s) in sites.iter().enumerate() {
            if s >= self.n {
                return Err(Error::InvalidRegion(format!("site {s} out of range for L = {}", self.n)));
            }
            if sites[..i].contains(&s) {
                return Err(Error::InvalidRegion(format!("site {s} repeated")));
            }
        }
        Ok(())
    }

    /// Applies a unitary on `sites` (first site most significant in `u`).
    pub fn apply_gate(&mut self, u: &CMatrix, sites: &[usize]) -> Result<()> {
        self.check_sites(sites)?;
        let expected = self.q.pow(sites.len() as u32);
        if u.dim() != expected {
            return Err(Error::DimensionMismatch { expected, got: u.dim() });
        }
        let dev = u.unitarity_deviation();
        if dev > UNITARY_TOL {
            return Err(Error::NonUnitary { deviation: dev });
        }
        kernel::apply_local(&mut self.amps, self.n, self.q, u, sites);
        Ok(())
    }

    pub fn apply(&mut self, gate: &Gate, sites: &[usize]) -> Result<()> {
        self.apply_gate(gate.dense(), sites)
    }

    fn rotate_to_z(&mut self, site: usize, basis: Pauli, inverse: bool) {
        let h = named::hadamard();
        let sdg = named::phase().adjoint();
        match (basis, inverse) {
            (Pauli::X, _) => kernel::apply_local(&mut self.amps, self.n, 2, &h, &[site]),
            (Pauli::Y, false) => {
                kernel::apply_local(&mut self.amps, self.n, 2, &sdg, &[site]);
                kernel::apply_local(&mut self.amps, self.n, 2, &h, &[site]);
            }
            (Pauli::Y, true) => {
                kernel::apply_local(&mut self.amps, self.n, 2, &h, &[site]);
                kernel::apply_local(&mut self.amps, self.n, 2, &named::phase(), &[site]);
            }
            _ => {}
        }
    }

    /// Probability that measuring `basis` on `site` yields +1.
    pub fn probability_plus(&self, site: usize, basis: Pauli) -> Result<f64> {
        let mut s = self.clone();
        s.check_measurable(site, basis)?;
        s.rotate_to_z(site, basis, false);
        Ok(s.z_plus_weight(site))
    }

    fn check_measurable(&self, site: usize, basis: Pauli) -> Result<()> {
        if self.q != 2 {
            return Err(param("Pauli measurements need qubits"));
        }
        if basis == Pauli::I {
            return Err(param("cannot measure the identity"));
        }
        self.check_sites(&[site])
    }

    fn z_plus_weight(&self, site: usize) -> f64 {
        let bit = 1usize << (self.n - 1 - site);
        self.amps.iter().enumerate().filter(|(i, _)| i & bit == 0).map(|(_, z)| z.norm_sqr()).sum()
    }

    fn collapse_z(&mut self, site: usize, plus: bool, prob: f64) {
        let bit = 1usize << (self.n - 1 - site);
        let scale = 1.0 / prob.sqrt();
        for (i, z) in self.amps.iter_mut().enumerate() {
            if (i & bit == 0) == plus {
                *z *= scale;
            } else {
                *z = ZERO;
            }
        }
    }

    fn measure_with(&mut self, site: usize, basis: Pauli, choose: impl FnOnce(f64) -> Result<bool>) -> Result<Measurement> {
        self.check_measurable(site, basis)?;
        self.rotate_to_z(site, basis, false);
        let total = self.norm_sqr();
        let p_plus = (self.z_plus_weight(site) / total).clamp(0.0, 1.0);
        let p_minus = 1.0 - p_plus;
        if p_plus < BORN_FLOOR && p_minus < BORN_FLOOR {
            self.rotate_to_z(site, basis, true);
            return Err(Error::NumericalDegeneracy("both measurement outcomes have vanishing probability".into()));
        }
        let plus = match choose(p_plus) {
            Ok(v) => v,
            Err(e) => {
                self.rotate_to_z(site, basis, true);
                return Err(e);
            }
        };
        let prob = if plus { p_plus } else { p_minus };
        self.collapse_z(site, plus, prob * total);
        self.rotate_to_z(site, basis, true);
        Ok(Measurement { site, basis, outcome: if plus { 1 } else { -1 }, probability: prob })
    }

    /// Born-rule measurement of `basis` on `site`; the state is projected and
    /// renormalized.
    pub fn measure<R: Rng + ?Sized>(&mut self, site: usize, basis: Pauli, rng: &mut R) -> Result<Measurement> {
        let r: f64 = rng.random();
        self.measure_with(site, basis, |p_plus| Ok(r < p_plus))
    }

    /// Projects onto a chosen outcome; fails if it has vanishing probability.
    pub fn project(&mut self, site: usize, basis: Pauli, outcome: i8) -> Result<Measurement> {
        self.measure_with(site, basis, |p_plus| {
            let p = if outcome > 0 { p_plus } else { 1.0 - p_plus };
            if p < BORN_FLOOR {
                Err(Error::NumericalDegeneracy(format!("outcome {outcome} has probability {p:.3e}")))
            } else {
                Ok(outcome > 0)
            }
        })
    }

    /// Runs all layers of `circuit`, sampling measurements from `rng`.
    pub fn run_circuit<R: Rng + ?Sized>(&mut self, circuit: &Circuit, rng: &mut R) -> Result<TrajectoryRecord> {
        if circuit.n_sites != self.n || circuit.q != self.q {
            return Err(Error::DimensionMismatch { expected: self.n, got: circuit.n_sites });
        }
        let mut rec = TrajectoryRecord::default();
        for (li, layer) in circuit.layers.iter().enumerate() {
            for e in &layer.events {
                match e {
                    Event::Gate { sites, gate } => self.apply(gate, sites)?,
                    Event::Measure { site, basis } => {
                        let m = self.measure(*site, *basis, rng)?;
                        rec.log_prob += m.probability.ln();
                        rec.outcomes.push((li, m));
                    }
                }
            }
        }
        Ok(rec)
    }
}
