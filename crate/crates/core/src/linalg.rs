//! Small dense complex matrices.

use std::ops::{Add, Mul};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, got: data.len() });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = d;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[C64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &CMatrix) -> Self {
        let (a, b) = (self.dim, other.dim);
        let d = a * b;
        let mut out = Self::zeros(d);
        for i1 in 0..a {
            for j1 in 0..a {
                let s = self.data[i1 * a + j1];
                if s == ZERO {
                    continue;
                }
                for i2 in 0..b {
                    for j2 in 0..b {
                        out.data[(i1 * b + i2) * d + j1 * b + j2] = s * other.data[i2 * b + j2];
                    }
                }
            }
        }
        out
    }

    /// `max |U†U − 1|` entrywise.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = &self.adjoint() * self;
        p.max_abs_diff(&Self::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.rows().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    /// Eigenvalues of a Hermitian matrix, descending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.to_nalgebra().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
        let d = self.dim;
        let mut out = CMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * d..(k + 1) * d];
                for (o, b) in out.data[i * d..(i + 1) * d].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

/// Phases `θ_k ∈ (−π, π]` of the eigenvalues of a unitary matrix.
///
/// Diagonalizes the Hermitian combination `a·(W+W†)/2 + b·(W−W†)/2i` with
/// generic weights, which shares eigenvectors with `W` when its spectrum is
/// simple, then reads each phase off the Rayleigh quotient. Falls back to a
/// complex Schur decomposition if the residual check fails.
pub fn unitary_eigenphases(w: &CMatrix) -> Result<Vec<f64>> {
    let d = w.dim();
    let m = w.to_nalgebra();
    let adj = m.adjoint();
    let (a, b) = (0.754_877_666_246_692_7, 0.569_840_290_998_053_2);
    let herm = (&m + &adj).scale(a / 2.0) + (&m - &adj) * C64::new(0.0, -b / 2.0);
    let eig = nalgebra::SymmetricEigen::new(herm);
    let mut phases = Vec::with_capacity(d);
    let mut worst: f64 = 0.0;
    for k in 0..d {
        let v = eig.eigenvectors.column(k);
        let wv = &m * v;
        let lambda = v.dotc(&wv);
        worst = worst.max((wv - v * lambda).norm());
        phases.push(lambda.arg());
    }
    if worst < 1e-8 {
        return Ok(phases);
    }
    let schur = nalgebra::Schur::new(m);
    let (_, t) = schur.unpack();
    let phases: Vec<f64> = (0..d).map(|k| t[(k, k)].arg()).collect();
    let recon: f64 = (0..d).map(|k| (t[(k, k)].norm() - 1.0).abs()).fold(0.0, f64::max);
    if recon > 1e-8 {
        return Err(Error::NumericalDegeneracy(format!(
            "eigen-decomposition of a unitary failed (residual {worst:.2e})"
        )));
    }
    Ok(phases)
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        let data = self.as_slice().iter().zip(rhs.as_slice()).map(|(a, b)| a + b).collect();
        CMatrix::from_vec(self.dim(), data).expect("same dimension")
    }
}
