//! Monitored Clifford dynamics built on [`Tableau`].

use rand::Rng;

use super::{InitialState, Tableau};
use crate::circuit::{brickwork_pairs, Boundary, CliffordTable2};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

/// Brickwork of random two-qubit Cliffords, each layer followed by `Z`
/// measurements placed independently with probability `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridParams {
    pub depth: usize,
    pub p: f64,
    pub boundary: Boundary,
    /// Layers after which observables are recorded (0 = initial state).
    pub checkpoints: Vec<usize>,
    /// Brickwork index of the first layer; parity sets which bonds go first.
    pub first_layer: usize,
    pub record_tmi: bool,
    /// Gates act on qubits `0..active` only; the rest (e.g. a reference
    /// qubit) are spectators. `None` means all qubits.
    pub active: Option<usize>,
}

impl HybridParams {
    pub fn new(depth: usize, p: f64, boundary: Boundary) -> Self {
        Self { depth, p, boundary, checkpoints: vec![depth], first_layer: 1, record_tmi: false, active: None }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MonitoredRunResult {
    pub checkpoints: Vec<usize>,
    /// Entropy of the left half `[0, L/2)`, bits.
    pub half_entropy: Vec<f64>,
    /// `L − k`, bits.
    pub purification: Vec<f64>,
    /// Tripartite mutual information of ring quarters, bits; empty unless
    /// requested.
    pub tmi: Vec<f64>,
    pub random_outcomes: usize,
    pub deterministic_outcomes: usize,
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("measurement probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// `I3(A:B:C)` for the four contiguous quarters `A, B, C, D` of the chain,
/// in bits. Requires `L` divisible by 4.
pub fn tmi_quarters(tab: &Tableau) -> Result<i64> {
    tmi_quarters_of(tab, tab.n_qubits())
}

fn tmi_quarters_of(tab: &Tableau, n: usize) -> Result<i64> {
    if !n.is_multiple_of(4) {
        return Err(Error::InvalidGeometry(format!("TMI quarters need L divisible by 4, got {n}")));
    }
    let q = n / 4;
    let a: Vec<usize> = (0..q).collect();
    let b: Vec<usize> = (q..2 * q).collect();
    let c: Vec<usize> = (2 * q..3 * q).collect();
    let s = |r: &[&[usize]]| -> Result<i64> {
        let v: Vec<usize> = r.iter().flat_map(|x| x.iter().copied()).collect();
        Ok(tab.entropy(&v)? as i64)
    };
    Ok(s(&[&a])? + s(&[&b])? + s(&[&c])? - s(&[&a, &b])? - s(&[&a, &c])? - s(&[&b, &c])? + s(&[&a, &b, &c])?)
}

/// Runs hybrid dynamics in place and records observables at checkpoints.
pub fn run_hybrid<R: Rng + ?Sized>(tab: &mut Tableau, params: &HybridParams, rng: &mut R) -> Result<MonitoredRunResult> {
    check_p(params.p)?;
    let n = params.active.unwrap_or(tab.n_qubits());
    if n > tab.n_qubits() || n < 2 {
        return Err(Error::InvalidGeometry(format!("active region of {n} qubits")));
    }
    let mut res = MonitoredRunResult::default();
    let half: Vec<usize> = (0..n / 2).collect();
    let record = |tab: &Tableau, t: usize, res: &mut MonitoredRunResult| -> Result<()> {
        if params.checkpoints.contains(&t) {
            res.checkpoints.push(t);
            res.half_entropy.push(tab.entropy(&half)? as f64);
            res.purification.push(tab.purification_entropy() as f64);
            if params.record_tmi {
                res.tmi.push(tmi_quarters_of(tab, n)? as f64);
            }
        }
        Ok(())
    };
    record(tab, 0, &mut res)?;
    for t in 1..=params.depth {
        for (a, b) in brickwork_pairs(n, params.first_layer + t - 1, params.boundary)? {
            tab.apply_clifford2(&CliffordTable2::sample(rng), a, b)?;
        }
        if params.p > 0.0 {
            for q in 0..n {
                if rng.random::<f64>() < params.p {
                    if tab.collapse_z(q, rng)?.was_random() {
                        res.random_outcomes += 1;
                    } else {
                        res.deterministic_outcomes += 1;
                    }
                }
            }
        }
        record(tab, t, &mut res)?;
    }
    Ok(res)
}

/// Reference-qubit protocol on `n` system qubits plus one ancilla.
///
/// A unitary Clifford brickwork of depth `n` scrambles the system, the middle
/// qubit is measured in `Z` and then entangled with the ancilla by `H` and a
/// CNOT, and hybrid dynamics at rate `p` run for `layers` layers. Returns the
/// ancilla entropy in bits after each layer, starting with layer 0.
pub fn reference_qubit_run<R: Rng + ?Sized>(
    n: usize,
    p: f64,
    layers: usize,
    boundary: Boundary,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_p(p)?;
    let mut tab = Tableau::new(n + 1, &InitialState::AllUp)?;
    let prelude = HybridParams { active: Some(n), checkpoints: vec![], ..HybridParams::new(n, 0.0, boundary) };
    run_hybrid(&mut tab, &prelude, rng)?;
    let mid = n / 2;
    tab.collapse_z(mid, rng)?;
    tab.h(n)?;
    tab.cnot(n, mid)?;
    let params = HybridParams {
        active: Some(n),
        checkpoints: vec![],
        first_layer: n + 1,
        ..HybridParams::new(1, p, boundary)
    };
    let mut series = vec![tab.entropy(&[n])? as f64];
    for t in 0..layers {
        let step = HybridParams { first_layer: params.first_layer + t, ..params.clone() };
        run_hybrid(&mut tab, &step, rng)?;
        series.push(tab.entropy(&[n])? as f64);
    }
    Ok(series)
}

/// `χ^SG = L⁻² Σ_ij ⟨Z_i Z_j⟩²` of a pure stabilizer state.
pub fn spin_glass_order(tab: &Tableau) -> Result<f64> {
    let n = tab.n_qubits() as f64;
    Ok(tab.zz_groups()?.iter().map(|g| (g.len() * g.len()) as f64).sum::<f64>() / (n * n))
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsingParams {
    pub n: usize,
    pub p_z: f64,
    /// Time units; each has `n` random-sequential measurements.
    pub time: usize,
    pub boundary: Boundary,
    /// Times at which `χ^SG` is recorded.
    pub checkpoints: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsingResult {
    pub checkpoints: Vec<usize>,
    pub chi: Vec<f64>,
    pub tableau: Tableau,
}

/// Measurement-only dynamics from `|+…+⟩`: each step picks a uniform site
/// `i` and measures `Z_i Z_{i+1}` with probability `p_z`, else `X_i`.
pub fn measurement_only_ising<R: Rng + ?Sized>(params: &IsingParams, rng: &mut R) -> Result<IsingResult> {
    check_p(params.p_z)?;
    let n = params.n;
    if n < 2 {
        return Err(Error::InvalidGeometry("need at least two sites".into()));
    }
    let mut tab = Tableau::new(n, &InitialState::AllPlus)?;
    let bonds = match params.boundary {
        Boundary::Periodic => n,
        Boundary::Open => n - 1,
    };
    let mut res = IsingResult { checkpoints: vec![], chi: vec![], tableau: tab.clone() };
    let mut ops = PauliString::identity(n);
    for t in 0..=params.time {
        if t > 0 {
            for _ in 0..n {
                if rng.random::<f64>() < params.p_z {
                    let b = rng.random_range(0..bonds);
                    ops.ops[b] = Pauli::Z;
                    ops.ops[(b + 1) % n] = Pauli::Z;
                    tab.measure_pauli(&ops, rng)?;
                    ops.ops[b] = Pauli::I;
                    ops.ops[(b + 1) % n] = Pauli::I;
                } else {
                    let i = rng.random_range(0..n);
                    ops.ops[i] = Pauli::X;
                    tab.measure_pauli(&ops, rng)?;
                    ops.ops[i] = Pauli::I;
                }
            }
        }
        if params.checkpoints.contains(&t) {
            res.checkpoints.push(t);
            res.chi.push(spin_glass_order(&tab)?);
        }
    }
    res.tableau = tab;
    Ok(res)
}

/// `δS(x)`: drop of the left-half entropy `S_{[0, L/2)}` when `Z` is
/// measured on the site at distance `x` from the cut at `L/2`, i.e. site
/// `L/2 − 1 − x`. The tableau is not modified.
pub fn delta_s_profile<R: Rng + ?Sized>(tab: &Tableau, distances: &[usize], rng: &mut R) -> Result<Vec<i64>> {
    let n = tab.n_qubits();
    let half: Vec<usize> = (0..n / 2).collect();
    let before = tab.entropy(&half)? as i64;
    distances
        .iter()
        .map(|&x| {
            if x >= n / 2 {
                return Err(Error::InvalidRegion(format!("distance {x} outside the half chain")));
            }
            let mut t = tab.clone();
            t.collapse_z(n / 2 - 1 - x, rng)?;
            Ok(before - t.entropy(&half)? as i64)
        })
        .collect()
}
