//! Heisenberg-evolved operators as dense matrices, Pauli-string weights and
//! correlators. Traces are normalized so that `Tr 1 = 1`.

use super::kernel::apply_local;
use crate::circuit::{Circuit, Event};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};
use crate::pauli::{Pauli, PauliString};

/// Largest chain for which dense operators are built.
pub const DENSE_OPERATOR_CAP: usize = 10;

/// Dense operator on `n` qubits, stored row-major as a vector on `2n`
/// virtual qubits (row digits first).
#[derive(Debug, Clone, PartialEq)]
pub struct HeisenbergOperator {
    n: usize,
    data: Vec<C64>,
    support: Vec<bool>,
}

impl HeisenbergOperator {
    pub fn pauli_string(p: &PauliString) -> Result<Self> {
        let n = p.ops.len();
        if n > DENSE_OPERATOR_CAP {
            return Err(Error::CapExceeded { what: "dense operator chain", size: n, cap: DENSE_OPERATOR_CAP });
        }
        let dim = 1usize << n;
        let mut data = vec![ZERO; dim * dim];
        for row in 0..dim {
            // A Pauli string has exactly one nonzero entry per row.
            let mut col = 0;
            let mut val = C64::new(if p.negative { -1.0 } else { 1.0 }, 0.0);
            for (s, op) in p.ops.iter().enumerate() {
                let r = (row >> (n - 1 - s)) & 1;
                let m = op.matrix();
                let c = if m[2 * r] != ZERO { 0 } else { 1 };
                val *= m[2 * r + c];
                col |= c << (n - 1 - s);
            }
            data[(row << n) | col] = val;
        }
        let support = p.ops.iter().map(|&o| o != Pauli::I).collect();
        Ok(Self { n, data, support })
    }

    pub fn single(n: usize, site: usize, p: Pauli) -> Result<Self> {
        if site >= n {
            return Err(Error::InvalidRegion(format!("site {site} out of range for L = {n}")));
        }
        Self::pauli_string(&PauliString::single(n, site, p))
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    /// Matrix element `O_{row, col}`.
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[(row << self.n) | col]
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_vec(1 << self.n, self.data.clone()).expect("square by construction")
    }

    /// Sites on which the operator may act nontrivially.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&s| self.support[s]).collect()
    }

    /// `O ← U O U†` for a gate acting on `sites`.
    pub fn conjugate(&mut self, u: &CMatrix, sites: &[usize]) {
        let n = self.n;
        apply_local(&mut self.data, 2 * n, 2, u, sites);
        let cols: Vec<usize> = sites.iter().map(|s| n + s).collect();
        apply_local(&mut self.data, 2 * n, 2, &u.conj(), &cols);
        for &s in sites {
            self.support[s] = true;
        }
    }

    /// Conjugates by one circuit layer. Gates that do not touch the current
    /// support act trivially and are skipped.
    pub fn evolve_layer(&mut self, layer: &crate::circuit::Layer) -> Result<()> {
        for e in &layer.events {
            match e {
                Event::Gate { sites, gate } => {
                    if sites.iter().any(|&s| self.support[s]) {
                        self.conjugate(gate.dense(), sites);
                    }
                }
                Event::Measure { .. } => {
                    return Err(Error::InvalidParameter("Heisenberg evolution needs a unitary circuit".into()))
                }
            }
        }
        Ok(())
    }

    pub fn evolve(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_sites != self.n || circuit.q != 2 {
            return Err(Error::DimensionMismatch { expected: self.n, got: circuit.n_sites });
        }
        circuit.layers.iter().try_for_each(|l| self.evolve_layer(l))
    }

    /// `Tr[O†O]` with normalized trace.
    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() / (1u64 << self.n) as f64
    }

    /// `Tr[O P_site]` with normalized trace.
    pub fn overlap_single(&self, site: usize, p: Pauli) -> C64 {
        let n = self.n;
        let bit = 1usize << (n - 1 - site);
        let m = p.matrix();
        let mut acc = ZERO;
        for i in 0..1usize << n {
            let is = usize::from(i & bit != 0);
            for js in 0..2 {
                let pj = m[2 * js + is];
                if pj != ZERO {
                    let j = (i & !bit) | (js * bit);
                    acc += self.data[(i << n) | j] * pj;
                }
            }
        }
        acc / (1u64 << n) as f64
    }

    /// `1 − Re Tr[O P O P]`; exactly zero when `site` lies outside the
    /// support, where the two operators commute.
    pub fn otoc_value(&self, site: usize, p: Pauli) -> f64 {
        if !self.support[site] {
            return 0.0;
        }
        1.0 - self.otoc_trace(site, p).re
    }

    /// `Re Tr[O P]` for a traceless single-site Pauli; exactly zero outside
    /// the support.
    pub fn two_point_value(&self, site: usize, p: Pauli) -> f64 {
        if !self.support[site] && p != Pauli::I {
            return 0.0;
        }
        self.overlap_single(site, p).re
    }

    /// `Tr[O P O P]` for a single-site Pauli `P`, normalized trace.
    pub fn otoc_trace(&self, site: usize, p: Pauli) -> C64 {
        let n = self.n;
        let mut pop = self.data.clone();
        let m = p.dense();
        apply_local(&mut pop, 2 * n, 2, &m, &[site]);
        apply_local(&mut pop, 2 * n, 2, &m.conj(), &[n + site]);
        // Tr[O · POP] = Σ_ij O_ij (POP)_ji
        let dim = 1usize << n;
        let mut acc = ZERO;
        for i in 0..dim {
            for j in 0..dim {
                acc += self.data[(i << n) | j] * pop[(j << n) | i];
            }
        }
        acc / dim as f64
    }
}

/// `O(r,t) = U O(r,0) U†` for a single-site Pauli at `site`.
pub fn heisenberg_evolve(circuit: &Circuit, site: usize, p: Pauli) -> Result<HeisenbergOperator> {
    let mut op = HeisenbergOperator::single(circuit.n_sites, site, p)?;
    op.evolve(circuit)?;
    Ok(op)
}

/// Squared Pauli-string amplitudes `a_S²`, indexed in base 4 with site 0 the
/// most significant digit and codes I=0, X=1, Y=2, Z=3.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliWeights {
    n: usize,
    weights: Vec<f64>,
}

impl PauliWeights {
    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn index_of(ops: &[Pauli]) -> usize {
        ops.iter().fold(0, |acc, p| 4 * acc + p.code() as usize)
    }

    pub fn digits(&self, index: usize) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.n).map(move |s| Pauli::from_code(((index >> (2 * (self.n - 1 - s))) & 3) as u8))
    }

    pub fn weight(&self, s: &PauliString) -> f64 {
        self.weights[Self::index_of(&s.ops)]
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Nonzero strings with their weights.
    pub fn iter(&self) -> impl Iterator<Item = (PauliString, f64)> + '_ {
        self.weights.iter().enumerate().filter(|(_, &w)| w > 0.0).map(|(i, &w)| {
            (PauliString { negative: false, ops: self.digits(i).collect() }, w)
        })
    }

    /// Probability that site `j` carries a non-identity Pauli.
    pub fn site_density(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for (i, &w) in self.weights.iter().enumerate() {
            for (s, p) in self.digits(i).enumerate() {
                if p != Pauli::I {
                    d[s] += w;
                }
            }
        }
        d
    }

    fn endpoint_density(&self, right: bool) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for (i, &w) in self.weights.iter().enumerate().skip(1) {
            let ops: Vec<Pauli> = self.digits(i).collect();
            let s = if right {
                ops.iter().rposition(|&p| p != Pauli::I)
            } else {
                ops.iter().position(|&p| p != Pauli::I)
            };
            if let Some(s) = s {
                d[s] += w;
            }
        }
        d
    }

    pub fn right_endpoint_density(&self) -> Vec<f64> {
        self.endpoint_density(true)
    }

    pub fn left_endpoint_density(&self) -> Vec<f64> {
        self.endpoint_density(false)
    }
}

/// Expands `op` in Pauli strings by a per-site change of basis.
pub fn pauli_weights(op: &HeisenbergOperator) -> PauliWeights {
    let n = op.n;
    let mut c = op.data.clone();
    let half = C64::new(0.5, 0.0);
    let ihalf = C64::new(0.0, 0.5);
    for s in 0..n {
        let rb = 1usize << (2 * n - 1 - s);
        let cb = 1usize << (n - 1 - s);
        for i00 in 0..c.len() {
            if i00 & (rb | cb) != 0 {
                continue;
            }
            let (o00, o01, o10, o11) = (c[i00], c[i00 | cb], c[i00 | rb], c[i00 | rb | cb]);
            c[i00] = half * (o00 + o11);
            c[i00 | cb] = half * (o01 + o10);
            c[i00 | rb] = ihalf * (o01 - o10);
            c[i00 | rb | cb] = half * (o00 - o11);
        }
    }
    let mut weights = vec![0.0; c.len()];
    for (idx, z) in c.iter().enumerate() {
        let code = (0..n).fold(0, |acc, s| {
            let r = (idx >> (2 * n - 1 - s)) & 1;
            let col = (idx >> (n - 1 - s)) & 1;
            4 * acc + 2 * r + col
        });
        weights[code] = z.norm_sqr();
    }
    PauliWeights { n, weights }
}

/// `−½ Tr([O(r,t), P]²) = 1 − Re Tr[O P O P]` for the Pauli `p` evolved from
/// `r` and the Pauli `probe_p` at `probe`.
pub fn otoc(circuit: &Circuit, r: usize, p: Pauli, probe: usize, probe_p: Pauli) -> Result<f64> {
    let op = heisenberg_evolve(circuit, r, p)?;
    if probe >= circuit.n_sites {
        return Err(Error::InvalidRegion(format!("probe site {probe} out of range")));
    }
    Ok(op.otoc_value(probe, probe_p))
}

/// `G = Tr[O(r,t) P_probe]`, real for Hermitian operators.
pub fn two_point(circuit: &Circuit, r: usize, p: Pauli, probe: usize, probe_p: Pauli) -> Result<f64> {
    let op = heisenberg_evolve(circuit, r, p)?;
    if probe >= circuit.n_sites {
        return Err(Error::InvalidRegion(format!("probe site {probe} out of range")));
    }
    Ok(op.two_point_value(probe, probe_p))
}

/// Sample mean of a quantity and of its square, with standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CorrelatorStats {
    pub mean: f64,
    pub stderr: f64,
    pub mean_sq: f64,
    pub stderr_sq: f64,
    pub samples: usize,
}

impl CorrelatorStats {
    pub fn from_samples(xs: &[f64]) -> Self {
        let m = xs.len();
        let stats = |v: &mut dyn Iterator<Item = f64>| {
            let v: Vec<f64> = v.collect();
            let mean = v.iter().sum::<f64>() / m as f64;
            let var = if m > 1 { v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1) as f64 } else { 0.0 };
            (mean, (var / m as f64).sqrt())
        };
        let (mean, stderr) = stats(&mut xs.iter().copied());
        let (mean_sq, stderr_sq) = stats(&mut xs.iter().map(|x| x * x));
        Self { mean, stderr, mean_sq, stderr_sq, samples: m }
    }
}

/// Layer-resolved ensemble statistics of `G(t) = Tr[O(r,t) P_probe]` for
/// `t = 0..=depth`; `sample` draws one unitary circuit per realization.
pub fn ensemble_two_point<R, F>(
    samples: usize,
    rng: &mut R,
    mut sample: F,
    r: usize,
    p: Pauli,
    probe: usize,
    probe_p: Pauli,
) -> Result<Vec<CorrelatorStats>>
where
    R: rand::Rng + ?Sized,
    F: FnMut(&mut R) -> Result<Circuit>,
{
    let mut series: Vec<Vec<f64>> = Vec::new();
    for _ in 0..samples {
        let c = sample(rng)?;
        let mut op = HeisenbergOperator::single(c.n_sites, r, p)?;
        series.resize_with(c.depth() + 1, Vec::new);
        series[0].push(op.two_point_value(probe, probe_p));
        for (t, layer) in c.layers.iter().enumerate() {
            op.evolve_layer(layer)?;
            series[t + 1].push(op.two_point_value(probe, probe_p));
        }
    }
    Ok(series.iter().map(|xs| CorrelatorStats::from_samples(xs)).collect())
}

/// Ensemble OTOC after the full circuit, for every probe site.
pub fn ensemble_otoc<R, F>(samples: usize, rng: &mut R, mut sample: F, r: usize, p: Pauli, probe_p: Pauli) -> Result<Vec<CorrelatorStats>>
where
    R: rand::Rng + ?Sized,
    F: FnMut(&mut R) -> Result<Circuit>,
{
    let mut per_site: Vec<Vec<f64>> = Vec::new();
    for _ in 0..samples {
        let c = sample(rng)?;
        let op = heisenberg_evolve(&c, r, p)?;
        per_site.resize_with(c.n_sites, Vec::new);
        for (s, xs) in per_site.iter_mut().enumerate() {
            xs.push(op.otoc_value(s, probe_p));
        }
    }
    Ok(per_site.iter().map(|xs| CorrelatorStats::from_samples(xs)).collect())
}
