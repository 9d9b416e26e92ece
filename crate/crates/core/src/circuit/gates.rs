//! Unitary gate ensembles: Haar, U(1)-symmetric, dual-unitary and fixed gates.

use std::f64::consts::FRAC_PI_4;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::clifford::CliffordGate;
use crate::error::{param, Error, Result};
use crate::linalg::{CMatrix, C64, ONE, ZERO};

/// Tolerance used to accept a matrix as unitary.
pub const UNITARY_TOL: f64 = 1e-10;

/// Which ensemble (or fixed family) a gate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateKind {
    Haar,
    U1,
    Clifford,
    DualUnitary,
    Fixed,
}

/// A dense gate on one or two sites of local dimension `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryGate {
    pub kind: GateKind,
    pub q: usize,
    pub arity: usize,
    matrix: CMatrix,
}

impl UnitaryGate {
    /// Wraps a matrix without checking unitarity; engines check on application.
    pub fn from_matrix(kind: GateKind, q: usize, matrix: CMatrix) -> Result<Self> {
        let arity = match matrix.dim() {
            d if d == q => 1,
            d if d == q * q => 2,
            d => return Err(Error::DimensionMismatch { expected: q * q, got: d }),
        };
        Ok(Self { kind, q, arity, matrix })
    }

    /// Like [`UnitaryGate::from_matrix`] but rejects non-unitary input.
    pub fn new(kind: GateKind, q: usize, matrix: CMatrix) -> Result<Self> {
        let dev = matrix.unitarity_deviation();
        if dev > UNITARY_TOL {
            return Err(Error::NonUnitary { deviation: dev });
        }
        Self::from_matrix(kind, q, matrix)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// A gate as stored in a circuit.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Unitary(Arc<UnitaryGate>),
    Clifford(Arc<CliffordGate>),
}

impl Gate {
    pub fn arity(&self) -> usize {
        match self {
            Gate::Unitary(g) => g.arity,
            Gate::Clifford(c) => c.arity(),
        }
    }

    pub fn q(&self) -> usize {
        match self {
            Gate::Unitary(g) => g.q,
            Gate::Clifford(_) => 2,
        }
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Unitary(g) => g.kind,
            Gate::Clifford(_) => GateKind::Clifford,
        }
    }

    /// Dense matrix in the computational basis, first site most significant.
    pub fn dense(&self) -> &CMatrix {
        match self {
            Gate::Unitary(g) => g.matrix(),
            Gate::Clifford(c) => c.dense(),
        }
    }
}

impl From<UnitaryGate> for Gate {
    fn from(g: UnitaryGate) -> Self {
        Gate::Unitary(Arc::new(g))
    }
}

impl From<CliffordGate> for Gate {
    fn from(c: CliffordGate) -> Self {
        Gate::Clifford(Arc::new(c))
    }
}

/// Gate ensembles used by the circuit builders.
#[derive(Debug, Clone, PartialEq)]
pub enum GateEnsemble {
    /// Haar-random on U(q²).
    Haar { q: usize },
    /// Uniform two-qubit Clifford.
    Clifford,
    /// Block-Haar gates conserving total Z.
    U1,
    /// Random dual-unitary gates.
    DualUnitary,
    /// The same gate everywhere.
    Fixed(Gate),
}

impl GateEnsemble {
    pub fn q(&self) -> usize {
        match self {
            GateEnsemble::Haar { q } => *q,
            GateEnsemble::Fixed(g) => g.q(),
            _ => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GateEnsemble::Haar { q } if *q < 2 => Err(param("local dimension q must be at least 2")),
            GateEnsemble::Fixed(g) if g.arity() != 2 => Err(param("fixed brickwork gate must act on two sites")),
            _ => Ok(()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Gate {
        match self {
            GateEnsemble::Haar { q } => sample_haar_gate(*q, rng).into(),
            GateEnsemble::Clifford => CliffordGate::sample2(rng).into(),
            GateEnsemble::U1 => sample_u1_gate(rng).into(),
            GateEnsemble::DualUnitary => sample_dual_unitary(rng).into(),
            GateEnsemble::Fixed(g) => g.clone(),
        }
    }
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random unitary of dimension `dim`.
///
/// Orthonormalizes the columns of a complex Ginibre matrix (Gram-Schmidt with
/// one re-orthogonalization pass). The resulting triangular factor has a
/// positive real diagonal, which is the uniqueness condition that makes the
/// output exactly Haar distributed.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let mut cols: Vec<Vec<C64>> = (0..dim).map(|_| (0..dim).map(|_| complex_gaussian(rng)).collect()).collect();
    for j in 0..dim {
        for _pass in 0..2 {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let qk = &done[k];
                let proj: C64 = qk.iter().zip(rest[0].iter()).map(|(a, b)| a.conj() * b).sum();
                for (v, a) in rest[0].iter_mut().zip(qk) {
                    *v -= proj * a;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    let mut m = CMatrix::zeros(dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            m.set(i, j, v);
        }
    }
    m
}

/// Two-site Haar gate on U(q²).
pub fn sample_haar_gate<R: Rng + ?Sized>(q: usize, rng: &mut R) -> UnitaryGate {
    assert!(q >= 2, "local dimension must be at least 2");
    UnitaryGate { kind: GateKind::Haar, q, arity: 2, matrix: haar_unitary(q * q, rng) }
}

/// Two-qubit gate conserving total Z: random phases on |↑↑⟩ and |↓↓⟩ and a
/// Haar U(2) block on {|↑↓⟩, |↓↑⟩}.
pub fn sample_u1_gate<R: Rng + ?Sized>(rng: &mut R) -> UnitaryGate {
    let tau = std::f64::consts::TAU;
    let mut m = CMatrix::zeros(4);
    m.set(0, 0, C64::from_polar(1.0, rng.random::<f64>() * tau));
    m.set(3, 3, C64::from_polar(1.0, rng.random::<f64>() * tau));
    let block = haar_unitary(2, rng);
    for i in 0..2 {
        for j in 0..2 {
            m.set(1 + i, 1 + j, block.get(i, j));
        }
    }
    UnitaryGate { kind: GateKind::U1, q: 2, arity: 2, matrix: m }
}

/// `exp[−i(π/4)(XX + YY) − iJ ZZ]`.
///
/// The two terms commute; on {|00⟩,|11⟩} the exponent is `−iJ` and on the
/// {|01⟩,|10⟩} block it is `iJ − i(π/2)σˣ`.
pub fn dual_unitary_core(j: f64) -> CMatrix {
    let outer = C64::from_polar(1.0, -j);
    let inner = C64::from_polar(1.0, j);
    let c = (2.0 * FRAC_PI_4).cos();
    let s = (2.0 * FRAC_PI_4).sin();
    let mut m = CMatrix::zeros(4);
    m.set(0, 0, outer);
    m.set(3, 3, outer);
    m.set(1, 1, inner * c);
    m.set(2, 2, inner * c);
    m.set(1, 2, inner * C64::new(0.0, -s));
    m.set(2, 1, inner * C64::new(0.0, -s));
    m
}

/// `(v₁⊗v₂)·V(J)·(v₃⊗v₄)` with `V(J) = exp[−i(π/4)(XX+YY) − iJ ZZ]`.
pub fn make_dual_unitary(j: f64, v: [&CMatrix; 4]) -> Result<UnitaryGate> {
    for m in v {
        if m.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: m.dim() });
        }
    }
    let left = v[0].kron(v[1]);
    let right = v[2].kron(v[3]);
    let m = &(&left * &dual_unitary_core(j)) * &right;
    UnitaryGate::new(GateKind::DualUnitary, 2, m)
}

/// Dual-unitary gate with Haar single-site dressings and `J ∈ [0, π/4)`.
pub fn sample_dual_unitary<R: Rng + ?Sized>(rng: &mut R) -> UnitaryGate {
    let j = rng.random::<f64>() * FRAC_PI_4;
    let v: Vec<CMatrix> = (0..4).map(|_| haar_unitary(2, rng)).collect();
    let mut g = make_dual_unitary(j, [&v[0], &v[1], &v[2], &v[3]]).expect("dressed dual-unitary gate");
    g.kind = GateKind::DualUnitary;
    g
}

fn local_dim(u: &CMatrix) -> Result<usize> {
    let d = u.dim();
    let q = (d as f64).sqrt().round() as usize;
    if q * q != d || q < 2 {
        return Err(Error::InvalidParameter(format!("spacetime flip needs a two-site gate, got dimension {d}")));
    }
    Ok(q)
}

/// Sideways reshuffle `Ũ_{(i₂o₂),(i₁o₁)} = U_{(o₁o₂),(i₁i₂)}`; no normalization.
pub fn spacetime_flip(u: &CMatrix) -> Result<CMatrix> {
    let q = local_dim(u)?;
    let mut out = CMatrix::zeros(q * q);
    for o1 in 0..q {
        for o2 in 0..q {
            for i1 in 0..q {
                for i2 in 0..q {
                    out.set(i2 * q + o2, i1 * q + o1, u.get(o1 * q + o2, i1 * q + i2));
                }
            }
        }
    }
    Ok(out)
}

/// True iff both `u` and its spacetime flip are unitary within `tol`.
pub fn is_dual_unitary(u: &CMatrix, tol: f64) -> bool {
    u.is_unitary(tol) && spacetime_flip(u).is_ok_and(|f| f.is_unitary(tol))
}

/// Fixed gates in the computational basis (|0⟩ = |↑⟩, first site most significant).
pub mod named {
    use super::*;

    fn real(rows: &[&[f64]]) -> CMatrix {
        let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect();
        CMatrix::from_rows(&rows).expect("square literal")
    }

    pub fn identity(q: usize, arity: usize) -> CMatrix {
        CMatrix::identity(q.pow(arity as u32))
    }

    pub fn hadamard() -> CMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        real(&[&[s, s], &[s, -s]])
    }

    /// `P = diag(1, i)`.
    pub fn phase() -> CMatrix {
        CMatrix::from_rows(&[vec![ONE, ZERO], vec![ZERO, C64::new(0.0, 1.0)]]).expect("2x2")
    }

    pub fn cz() -> CMatrix {
        real(&[&[1., 0., 0., 0.], &[0., 1., 0., 0.], &[0., 0., 1., 0.], &[0., 0., 0., -1.]])
    }

    /// Control on the first site.
    pub fn cnot() -> CMatrix {
        real(&[&[1., 0., 0., 0.], &[0., 1., 0., 0.], &[0., 0., 0., 1.], &[0., 0., 1., 0.]])
    }

    pub fn swap() -> CMatrix {
        real(&[&[1., 0., 0., 0.], &[0., 0., 1., 0.], &[0., 1., 0., 0.], &[0., 0., 0., 1.]])
    }

    pub fn gate(m: CMatrix) -> Gate {
        UnitaryGate::new(GateKind::Fixed, 2, m).expect("named gates are unitary").into()
    }
}
