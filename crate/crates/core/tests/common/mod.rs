//! Oracles shared by the integration tests.
#![allow(dead_code)]

use circuitlab_core::circuit::{brickwork_pairs, Boundary, Circuit, Event, GateEnsemble, Geometry, Layer};
use circuitlab_core::linalg::C64;
use circuitlab_core::pauli::{Pauli, PauliString};
use circuitlab_core::stabilizer::{PauliMeasurement, Tableau};
use circuitlab_core::statevector::{entropy, PureState, Renyi};
use rand::Rng;

/// `P|v⟩` for a Pauli string, site 0 most significant.
pub fn apply_pauli(v: &[C64], p: &PauliString) -> Vec<C64> {
    let n = p.ops.len();
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    for (i, a) in v.iter().enumerate() {
        let mut j = i;
        let mut amp = *a;
        for (s, op) in p.ops.iter().enumerate() {
            let bit = 1 << (n - 1 - s);
            let b = usize::from(i & bit != 0);
            let m = op.matrix();
            // Column b of the 2x2 matrix has a single nonzero entry.
            let r = if m[b] != C64::new(0.0, 0.0) { 0 } else { 1 };
            amp *= m[2 * r + b];
            j = (j & !bit) | (r * bit);
        }
        out[j] += amp;
    }
    if p.negative {
        out.iter_mut().for_each(|z| *z = -*z);
    }
    out
}

/// Dense state stabilized by a full set of generators, built by projecting
/// computational basis states until one survives.
pub fn stabilizer_state(gens: &[PauliString]) -> PureState {
    let n = gens[0].ops.len();
    for seed in 0..1usize << n {
        let mut v = vec![C64::new(0.0, 0.0); 1 << n];
        v[seed] = C64::new(1.0, 0.0);
        for g in gens {
            let gv = apply_pauli(&v, g);
            v = v.iter().zip(&gv).map(|(a, b)| (a + b) * 0.5).collect();
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return PureState::from_amplitudes(n, 2, v.iter().map(|z| z / norm).collect()).unwrap();
        }
    }
    panic!("generators stabilize no state");
}

/// Random Clifford brickwork of `depth` layers, each followed by a layer of
/// single-site measurements in random Pauli bases with probability `p`.
pub fn random_hybrid<R: Rng>(n: usize, depth: usize, p: f64, rng: &mut R) -> Circuit {
    let mut c = Circuit::new(n, 2, Boundary::Open, Geometry::Custom);
    for tau in 1..=depth {
        let gates = brickwork_pairs(n, tau, Boundary::Open)
            .unwrap()
            .into_iter()
            .map(|(a, b)| Event::Gate { sites: vec![a, b], gate: GateEnsemble::Clifford.sample(rng) })
            .collect();
        c.push_layer(Layer::new(gates)).unwrap();
        let mut meas = Vec::new();
        for site in 0..n {
            if rng.random::<f64>() < p {
                meas.push(Event::Measure { site, basis: [Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..3)] });
            }
        }
        if !meas.is_empty() {
            c.push_layer(Layer::new(meas)).unwrap();
        }
    }
    c
}

/// Replays `circuit` on a dense state, forcing the recorded outcomes.
pub fn replay_dense(circuit: &Circuit, outcomes: &[(usize, usize, PauliMeasurement)]) -> PureState {
    let mut s = PureState::all_up(circuit.n_sites);
    let mut it = outcomes.iter();
    for layer in &circuit.layers {
        for e in &layer.events {
            match e {
                Event::Gate { sites, gate } => s.apply(gate, sites).unwrap(),
                Event::Measure { site, basis } => {
                    let (_, q, m) = it.next().expect("outcome recorded");
                    assert_eq!(q, site);
                    s.project(*site, *basis, m.outcome).unwrap();
                }
            }
        }
    }
    s
}

/// Every contiguous region `[i, j)` with `0 ≤ i < j ≤ n`.
pub fn contiguous_regions(n: usize) -> Vec<Vec<usize>> {
    (0..n).flat_map(|i| (i + 1..=n).map(move |j| (i..j).collect())).collect()
}

/// Largest deviation between stabilizer entropies (bits) and statevector
/// entropies (converted to bits) over contiguous regions.
pub fn max_entropy_mismatch(tab: &Tableau, dense: &PureState) -> f64 {
    contiguous_regions(tab.n_qubits())
        .iter()
        .map(|r| {
            let sv = entropy(dense, r, Renyi::VonNeumann).unwrap().value / std::f64::consts::LN_2;
            (sv - tab.entropy(r).unwrap() as f64).abs()
        })
        .fold(0.0, f64::max)
}
