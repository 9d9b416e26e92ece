//! Entanglement entropies of dense pure states.

use nalgebra::DMatrix;

use super::PureState;
use crate::error::{Error, Result};
use crate::linalg::C64;

/// Entropy index: von Neumann or Rényi of order `n` (`n > 0`, `n != 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Renyi {
    VonNeumann,
    Order(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyResult {
    pub region: Vec<usize>,
    pub index: Renyi,
    /// In nats.
    pub value: f64,
    /// Schmidt probabilities, descending.
    pub spectrum: Vec<f64>,
}

fn check_region(n: usize, region: &[usize]) -> Result<()> {
    for (i, &s) in region.iter().enumerate() {
        if s >= n {
            return Err(Error::InvalidRegion(format!("site {s} out of range for L = {n}")));
        }
        if region[..i].contains(&s) {
            return Err(Error::InvalidRegion(format!("site {s} repeated")));
        }
    }
    Ok(())
}

/// State reshaped as a `D_A × D_B` matrix, with the region digits in the
/// given order as the row index.
fn bipartition(state: &PureState, region: &[usize]) -> DMatrix<C64> {
    let (n, q) = (state.n, state.q);
    let comp: Vec<usize> = (0..n).filter(|s| !region.contains(s)).collect();
    let da = q.pow(region.len() as u32);
    let db = q.pow(comp.len() as u32);
    let pw: Vec<usize> = (0..n).map(|s| q.pow((n - 1 - s) as u32)).collect();
    let digit = |idx: usize, s: usize| (idx / pw[s]) % q;
    let mut m = DMatrix::<C64>::zeros(da, db);
    for (idx, &a) in state.amps.iter().enumerate() {
        let ia = region.iter().fold(0, |acc, &s| acc * q + digit(idx, s));
        let ib = comp.iter().fold(0, |acc, &s| acc * q + digit(idx, s));
        m[(ia, ib)] = a;
    }
    m
}

/// Reduced density matrix of the smaller side; both sides share the spectrum.
fn smaller_rho(state: &PureState, region: &[usize]) -> DMatrix<C64> {
    let m = bipartition(state, region);
    if m.nrows() <= m.ncols() {
        &m * m.adjoint()
    } else {
        m.adjoint() * &m
    }
}

/// Schmidt probabilities across `region | rest`, descending and clipped at 0.
pub fn schmidt_spectrum(state: &PureState, region: &[usize]) -> Result<Vec<f64>> {
    check_region(state.n, region)?;
    if region.is_empty() || region.len() == state.n {
        return Ok(vec![1.0]);
    }
    let rho = smaller_rho(state, region);
    let eig = nalgebra::SymmetricEigen::new(rho);
    let mut spec = Vec::with_capacity(eig.eigenvalues.len());
    for &l in eig.eigenvalues.iter() {
        if l < -1e-10 {
            return Err(Error::NumericalDegeneracy(format!("negative reduced eigenvalue {l:.3e}")));
        }
        spec.push(l.max(0.0));
    }
    spec.sort_by(|a, b| b.total_cmp(a));
    Ok(spec)
}

pub fn entropy_from_spectrum(spectrum: &[f64], index: Renyi) -> f64 {
    match index {
        Renyi::VonNeumann => -spectrum.iter().filter(|&&p| p > 0.0).map(|p| p * p.ln()).sum::<f64>(),
        Renyi::Order(a) => spectrum.iter().map(|p| p.powf(a)).sum::<f64>().ln() / (1.0 - a),
    }
}

pub fn entropy(state: &PureState, region: &[usize], index: Renyi) -> Result<EntropyResult> {
    if let Renyi::Order(a) = index {
        if !(a > 0.0) || a == 1.0 || !a.is_finite() {
            return Err(Error::InvalidParameter(format!("Renyi index must be positive, finite and != 1, got {a}")));
        }
    }
    let spectrum = schmidt_spectrum(state, region)?;
    Ok(EntropyResult { region: region.to_vec(), index, value: entropy_from_spectrum(&spectrum, index), spectrum })
}

/// `Tr ρ_A²`, computed without diagonalizing.
pub fn purity(state: &PureState, region: &[usize]) -> Result<f64> {
    check_region(state.n, region)?;
    if region.is_empty() || region.len() == state.n {
        return Ok(1.0);
    }
    Ok(smaller_rho(state, region).iter().map(|z| z.norm_sqr()).sum())
}

/// `I(A:B) = S_A + S_B − S_AB`.
pub fn mutual_information(state: &PureState, a: &[usize], b: &[usize], index: Renyi) -> Result<f64> {
    if a.iter().any(|s| b.contains(s)) {
        return Err(Error::RegionOverlap);
    }
    let ab: Vec<usize> = a.iter().chain(b).copied().collect();
    Ok(entropy(state, a, index)?.value + entropy(state, b, index)?.value - entropy(state, &ab, index)?.value)
}

/// Haar-averaged `Tr ρ_A²` of a pure state on `D_A ⊗ D_B`:
/// `(D_A + D_B)/(D_A D_B + 1)`.
pub fn haar_mean_purity(d_a: f64, d_b: f64) -> f64 {
    (d_a + d_b) / (d_a * d_b + 1.0)
}
