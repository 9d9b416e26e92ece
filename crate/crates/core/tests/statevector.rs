use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

use approx::assert_abs_diff_eq;
use circuitlab_core::circuit::{
    build_brickwork, named, place_measurements, Boundary, Circuit, Event, Gate, GateEnsemble, Geometry, Layer,
};
use circuitlab_core::linalg::{CMatrix, C64};
use circuitlab_core::pauli::{Pauli, PauliString};
use circuitlab_core::rng::{stream, Purpose};
use circuitlab_core::statevector::*;
use circuitlab_core::Error;
use proptest::prelude::*;
use rand::SeedableRng;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn plus() -> Vec<C64> {
    vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]
}

fn up() -> Vec<C64> {
    vec![c(1.0), c(0.0)]
}

fn cz_state() -> PureState {
    let mut s = PureState::product(2, 2, &[plus(), plus()]).unwrap();
    s.apply_gate(&named::cz(), &[0, 1]).unwrap();
    s
}

fn bell() -> PureState {
    PureState::from_amplitudes(2, 2, vec![c(FRAC_1_SQRT_2), c(0.0), c(0.0), c(FRAC_1_SQRT_2)]).unwrap()
}

fn single_layer(n: usize, events: Vec<Event>) -> Circuit {
    let mut circ = Circuit::new(n, 2, Boundary::Open, Geometry::Custom);
    circ.push_layer(Layer::new(events)).unwrap();
    circ
}

fn gate(m: CMatrix, sites: Vec<usize>) -> Event {
    Event::Gate { sites, gate: named::gate(m) }
}

#[test]
fn product_of_x_eigenstates() {
    let s = PureState::product(2, 2, &[plus(), plus()]).unwrap();
    for a in s.amplitudes() {
        assert_abs_diff_eq!(a.re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(a.im, 0.0);
    }
    let s = PureState::product(3, 2, &[up(), up(), up()]).unwrap();
    assert_eq!(s.amplitudes()[0], c(1.0));
    assert!(s.amplitudes()[1..].iter().all(|a| *a == c(0.0)));
    assert!(matches!(PureState::product(2, 2, &[plus()]), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn cz_entangles_both_spins_maximally() {
    let s = cz_state();
    let expected = [0.5, 0.5, 0.5, -0.5];
    for (a, e) in s.amplitudes().iter().zip(expected) {
        assert_abs_diff_eq!(a.re, e, epsilon = 1e-15);
    }
    for site in 0..2 {
        assert_abs_diff_eq!(entropy(&s, &[site], Renyi::VonNeumann).unwrap().value, LN_2, epsilon = 1e-12);
    }
}

#[test]
fn identity_and_commuting_gates() {
    let mut rng = stream(1, Purpose::Circuit);
    let s0 = PureState::haar_random(3, 2, &mut rng);
    let mut s = s0.clone();
    s.apply_gate(&named::identity(2, 2), &[0, 2]).unwrap();
    assert!(s.overlap(&s0) > 1.0 - 1e-12);

    let u = circuitlab_core::circuit::haar_unitary(2, &mut rng);
    let v = circuitlab_core::circuit::haar_unitary(2, &mut rng);
    let mut a = s0.clone();
    a.apply_gate(&u, &[0]).unwrap();
    a.apply_gate(&v, &[2]).unwrap();
    let mut b = s0.clone();
    b.apply_gate(&v, &[2]).unwrap();
    b.apply_gate(&u, &[0]).unwrap();
    let mut k = s0;
    k.apply_gate(&u.kron(&named::identity(2, 1)), &[0, 1]).unwrap();
    k.apply_gate(&v, &[2]).unwrap();
    for ((x, y), z) in a.amplitudes().iter().zip(b.amplitudes()).zip(k.amplitudes()) {
        assert!((x - y).norm() < 1e-13 && (x - z).norm() < 1e-13);
    }
}

#[test]
fn non_unitary_gates_and_bad_sites_are_rejected() {
    let mut s = PureState::all_up(2);
    let m = named::cz().scale(c(1.001));
    assert!(matches!(s.apply_gate(&m, &[0, 1]), Err(Error::NonUnitary { .. })));
    assert!(matches!(s.apply_gate(&named::cz(), &[0, 0]), Err(Error::InvalidRegion(_))));
    assert!(matches!(s.apply_gate(&named::cz(), &[0, 2]), Err(Error::InvalidRegion(_))));
}

#[test]
fn measuring_x_on_the_cz_state() {
    let s = cz_state();
    assert_abs_diff_eq!(s.probability_plus(0, Pauli::X).unwrap(), 0.5, epsilon = 1e-14);
    let mut p = s.clone();
    let m = p.project(0, Pauli::X, 1).unwrap();
    assert_abs_diff_eq!(m.probability, 0.5, epsilon = 1e-14);
    let target = PureState::product(2, 2, &[plus(), up()]).unwrap();
    assert!(p.overlap(&target) > 1.0 - 1e-12);
}

#[test]
fn z_on_up_is_deterministic() {
    let mut s = PureState::all_up(1);
    let m = s.measure(0, Pauli::Z, &mut stream(3, Purpose::Outcomes)).unwrap();
    assert_eq!(m.outcome, 1);
    assert_abs_diff_eq!(m.probability, 1.0);
    assert_eq!(s, PureState::all_up(1));
    assert!(matches!(s.project(0, Pauli::Z, -1), Err(Error::NumericalDegeneracy(_))));
}

#[test]
fn born_frequencies_match_probabilities() {
    let mut rng = stream(11, Purpose::Circuit);
    let s = PureState::haar_random(3, 2, &mut rng);
    for basis in [Pauli::X, Pauli::Y, Pauli::Z] {
        let p = s.probability_plus(1, basis).unwrap();
        let trials = 10_000;
        let hits = (0..trials).filter(|_| s.clone().measure(1, basis, &mut rng).unwrap().outcome == 1).count();
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((hits as f64 / trials as f64 - p).abs() < 4.0 * sigma, "{basis:?}: {hits} vs p = {p}");
    }
}

#[test]
fn y_measurement_projects_onto_y_eigenstates() {
    let mut rng = stream(5, Purpose::Circuit);
    let mut s = PureState::haar_random(2, 2, &mut rng);
    s.project(1, Pauli::Y, -1).unwrap();
    assert_abs_diff_eq!(s.probability_plus(1, Pauli::Y).unwrap(), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-12);
}

#[test]
fn run_circuit_records() {
    let mut rng = stream(2, Purpose::Circuit);
    let circ = build_brickwork(4, 3, Boundary::Open, &GateEnsemble::Haar { q: 2 }, &mut rng).unwrap();
    let mut s = PureState::all_up(4);
    let rec = s.run_circuit(&circ, &mut rng).unwrap();
    assert!(rec.outcomes.is_empty());
    assert_eq!(rec.log_prob, 0.0);

    let meas = single_layer(4, (0..4).map(|site| Event::Measure { site, basis: Pauli::Z }).collect());
    let mut s = PureState::all_up(4);
    let rec = s.run_circuit(&meas, &mut rng).unwrap();
    assert_eq!(rec.outcomes.len(), 4);
    assert!(rec.outcomes.iter().all(|(_, m)| m.outcome == 1));
    assert_eq!(rec.log_prob, 0.0);

    let monitored = place_measurements(&circ, 0.5, &mut stream(9, Purpose::Measurements)).unwrap();
    let run = || {
        let mut s = PureState::all_up(4);
        let rec = s.run_circuit(&monitored, &mut stream(4, Purpose::Outcomes)).unwrap();
        (s, rec)
    };
    assert_eq!(run(), run());
}

#[test]
fn entropy_examples() {
    let prod = PureState::product(3, 2, &[plus(), up(), plus()]).unwrap();
    let bell = bell();
    for idx in [Renyi::VonNeumann, Renyi::Order(0.5), Renyi::Order(2.0), Renyi::Order(3.0)] {
        assert_abs_diff_eq!(entropy(&prod, &[0, 2], idx).unwrap().value, 0.0, epsilon = 1e-12);
        for site in 0..2 {
            assert_abs_diff_eq!(entropy(&bell, &[site], idx).unwrap().value, LN_2, epsilon = 1e-12);
        }
    }
    assert!(entropy(&bell, &[0], Renyi::Order(1.0)).is_err());
    assert_abs_diff_eq!(mutual_information(&prod, &[0], &[1], Renyi::VonNeumann).unwrap(), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(mutual_information(&bell, &[0], &[1], Renyi::VonNeumann).unwrap(), 2.0 * LN_2, epsilon = 1e-12);
    assert_eq!(mutual_information(&bell, &[0], &[0, 1], Renyi::VonNeumann), Err(Error::RegionOverlap));
}

#[test]
fn haar_purity_oracle_matches_direct_integration_at_two_qubits() {
    // For two qubits Tr ρ² = 1 − 2|ad − bc|². On the unit sphere in C^4,
    // E|a|²|d|² = 1/(N(N+1)) with N = 4 and the cross term averages to zero.
    let direct = 1.0 - 2.0 * 2.0 / (4.0 * 5.0);
    assert_abs_diff_eq!(haar_mean_purity(2.0, 2.0), direct, epsilon = 1e-15);
}

#[test]
fn haar_states_have_page_purity() {
    let mut rng = stream(21, Purpose::Sampling);
    let samples = 10_000;
    let xs: Vec<f64> =
        (0..samples).map(|_| purity(&PureState::haar_random(8, 2, &mut rng), &[0, 1, 2, 3]).unwrap()).collect();
    let mean = xs.iter().sum::<f64>() / samples as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
    let se = (var / samples as f64).sqrt();
    let oracle = haar_mean_purity(16.0, 16.0);
    assert_abs_diff_eq!(oracle, 32.0 / 257.0, epsilon = 1e-15);
    assert!((mean - oracle).abs() < 4.0 * se, "{mean} vs {oracle} ± {se}");
}

#[test]
fn four_qubit_haar_average_matches_closed_form() {
    let mut rng = stream(22, Purpose::Sampling);
    let samples = 20_000;
    let xs: Vec<f64> =
        (0..samples).map(|_| purity(&PureState::haar_random(4, 2, &mut rng), &[0, 1]).unwrap()).collect();
    let mean = xs.iter().sum::<f64>() / samples as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
    let se = (var / samples as f64).sqrt();
    let oracle = haar_mean_purity(4.0, 4.0);
    assert_abs_diff_eq!(oracle, 8.0 / 17.0, epsilon = 1e-15);
    assert!((mean - oracle).abs() < 4.0 * se, "{mean} vs {oracle} ± {se}");
}

fn cz_circuit() -> Circuit {
    single_layer(2, vec![gate(named::cz(), vec![0, 1])])
}

#[test]
fn heisenberg_examples() {
    let id = single_layer(2, vec![gate(named::identity(2, 2), vec![0, 1])]);
    let op = heisenberg_evolve(&id, 0, Pauli::Z).unwrap();
    assert!(op.to_matrix().max_abs_diff(&HeisenbergOperator::single(2, 0, Pauli::Z).unwrap().to_matrix()) < 1e-15);

    let op = heisenberg_evolve(&cz_circuit(), 0, Pauli::X).unwrap();
    let xz = HeisenbergOperator::pauli_string(&"XZ".parse::<PauliString>().unwrap()).unwrap();
    assert!(op.to_matrix().max_abs_diff(&xz.to_matrix()) < 1e-14);
    assert_abs_diff_eq!(op.norm_sqr(), 1.0, epsilon = 1e-12);

    let w = pauli_weights(&op);
    assert_abs_diff_eq!(w.weight(&"XZ".parse().unwrap()), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(w.total(), 1.0, epsilon = 1e-12);

    let w = pauli_weights(&HeisenbergOperator::single(3, 0, Pauli::Z).unwrap());
    assert_abs_diff_eq!(w.weight(&"ZII".parse().unwrap()), 1.0, epsilon = 1e-12);
    assert_eq!(w.site_density(), vec![1.0, 0.0, 0.0]);
    assert_eq!(w.right_endpoint_density(), vec![1.0, 0.0, 0.0]);

    assert!(matches!(HeisenbergOperator::single(11, 0, Pauli::Z), Err(Error::CapExceeded { .. })));
}

#[test]
fn y_strings_are_recovered() {
    let p: PauliString = "-YXZ".parse().unwrap();
    let op = HeisenbergOperator::pauli_string(&p).unwrap();
    let w = pauli_weights(&op);
    assert_abs_diff_eq!(w.weight(&"YXZ".parse().unwrap()), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(w.total(), 1.0, epsilon = 1e-12);
}

#[test]
fn haar_evolution_keeps_unit_norm() {
    let mut rng = stream(6, Purpose::Circuit);
    let circ = build_brickwork(6, 6, Boundary::Open, &GateEnsemble::Haar { q: 2 }, &mut rng).unwrap();
    let op = heisenberg_evolve(&circ, 2, Pauli::Y).unwrap();
    assert_abs_diff_eq!(op.norm_sqr(), 1.0, epsilon = 1e-9);
    assert_abs_diff_eq!(pauli_weights(&op).total(), 1.0, epsilon = 1e-9);
}

#[test]
fn otoc_and_two_point_respect_the_lightcone() {
    let mut rng = stream(7, Purpose::Circuit);
    let circ = build_brickwork(8, 2, Boundary::Open, &GateEnsemble::Haar { q: 2 }, &mut rng).unwrap();
    for probe in 5..8 {
        assert_eq!(otoc(&circ, 0, Pauli::Z, probe, Pauli::X).unwrap(), 0.0);
        assert_eq!(two_point(&circ, 0, Pauli::Z, probe, Pauli::Z).unwrap(), 0.0);
    }
    let mut empty = Circuit::new(8, 2, Boundary::Open, Geometry::Custom);
    empty.push_layer(Layer::new(vec![])).unwrap();
    assert_abs_diff_eq!(otoc(&empty, 0, Pauli::Z, 0, Pauli::Z).unwrap(), 0.0, epsilon = 1e-14);
    assert_abs_diff_eq!(otoc(&empty, 0, Pauli::Z, 0, Pauli::X).unwrap(), 2.0, epsilon = 1e-14);
    assert_abs_diff_eq!(two_point(&empty, 0, Pauli::Z, 0, Pauli::Z).unwrap(), 1.0, epsilon = 1e-14);
    // Far-away OTOC of a scrambled operator is in [0, 2].
    let v = otoc(&circ, 0, Pauli::Z, 2, Pauli::X).unwrap();
    assert!((0.0..=2.0).contains(&v));
}

#[test]
fn haar_two_point_decays() {
    let mut rng = stream(8, Purpose::Circuit);
    let ens = GateEnsemble::Haar { q: 2 };
    let stats =
        ensemble_two_point(4000, &mut rng, |r| build_brickwork(8, 4, Boundary::Periodic, &ens, r), 0, Pauli::Z, 0, Pauli::Z)
            .unwrap();
    assert_abs_diff_eq!(stats[0].mean_sq, 1.0);
    for t in 1..4 {
        assert!(
            stats[t + 1].mean_sq < stats[t].mean_sq,
            "t = {t}: {} !< {}",
            stats[t + 1].mean_sq,
            stats[t].mean_sq
        );
    }
}

#[test]
fn sff_examples() {
    let mut rng = stream(12, Purpose::Sampling);
    let k0 = sff(&SffSource::Cue { dim: 8 }, 0, 3, &mut rng).unwrap();
    assert_abs_diff_eq!(k0.mean[0], 64.0, epsilon = 1e-9);

    let series = sff(&SffSource::Cue { dim: 32 }, 32, 3000, &mut rng).unwrap();
    for t in 1..=32 {
        let expect = t.min(32) as f64;
        let tol = 4.0 * series.stderr[t] + 0.05 * expect;
        assert!((series.mean[t] - expect).abs() < tol, "t = {t}: {} vs {expect}", series.mean[t]);
    }

    // A single matrix does not self-average: K(t)/t fluctuates at O(1).
    let w = circuitlab_core::circuit::haar_unitary(32, &mut rng);
    let phases = circuitlab_core::linalg::unitary_eigenphases(&w).unwrap();
    let ks: Vec<f64> = (1..=30).map(|t| spectral_form_factor(&phases, t) / t as f64).collect();
    let m = ks.iter().sum::<f64>() / ks.len() as f64;
    let rel_var = ks.iter().map(|k| (k - m).powi(2)).sum::<f64>() / ks.len() as f64 / (m * m);
    assert!(rel_var > 0.3, "relative variance {rel_var}");
}

#[test]
fn floquet_unitary_matches_dense_product() {
    let circ = cz_circuit();
    let u = floquet_unitary(&circ).unwrap();
    assert!(u.max_abs_diff(&named::cz()) < 1e-15);
}

#[test]
fn u1_circuits_conserve_magnetization() {
    let mut rng = stream(13, Purpose::Circuit);
    let circ = build_brickwork(6, 6, Boundary::Open, &GateEnsemble::U1, &mut rng).unwrap();
    let s0 = PureState::haar_random(6, 2, &mut rng);
    let mag = |s: &PureState| -> f64 {
        s.amplitudes()
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * (6.0 - 2.0 * i.count_ones() as f64))
            .sum()
    };
    let mut s = s0.clone();
    s.run_circuit(&circ, &mut rng).unwrap();
    assert_abs_diff_eq!(mag(&s), mag(&s0), epsilon = 1e-12);
}

#[test]
fn dual_unitary_correlations_live_on_light_rays() {
    let mut rng = stream(14, Purpose::Circuit);
    let n = 10;
    let r0 = n / 2;
    let circ = build_brickwork(n, 4, Boundary::Open, &GateEnsemble::DualUnitary, &mut rng).unwrap();
    for t in 1..=4 {
        let c = circ.truncated(t);
        let op = heisenberg_evolve(&c, r0, Pauli::Z).unwrap();
        for probe in 0..n {
            let x = probe as i64 - r0 as i64;
            let g = op.overlap_single(probe, Pauli::Z).norm();
            if x.unsigned_abs() as usize != t {
                assert!(g < 1e-10, "t = {t}, x = {x}: |G| = {g}");
            }
        }
    }
}

fn random_state(seed: u64, n: usize) -> PureState {
    PureState::haar_random(n, 2, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gates_preserve_norm(seed in any::<u64>(), depth in 1usize..6) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let circ = build_brickwork(5, depth, Boundary::Open, &GateEnsemble::Haar { q: 2 }, &mut rng).unwrap();
        let mut s = random_state(seed ^ 1, 5);
        s.run_circuit(&circ, &mut rng).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pure_state_entropy_is_symmetric(seed in any::<u64>(), mask in 1u32..63, order in 0.3f64..4.0) {
        let s = random_state(seed, 6);
        let a: Vec<usize> = (0..6).filter(|i| mask >> i & 1 == 1).collect();
        let b: Vec<usize> = (0..6).filter(|i| mask >> i & 1 == 0).collect();
        prop_assume!((order - 1.0).abs() > 1e-3);
        for idx in [Renyi::VonNeumann, Renyi::Order(order)] {
            let sa = entropy(&s, &a, idx).unwrap();
            let sb = entropy(&s, &b, idx).unwrap();
            prop_assert!((sa.value - sb.value).abs() < 1e-9);
            let sum: f64 = sa.spectrum.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-10);
            let bound = (a.len().min(b.len()) as f64) * LN_2;
            prop_assert!(sa.value >= -1e-12 && sa.value <= bound + 1e-9);
        }
    }

    #[test]
    fn renyi_entropies_decrease_with_index(seed in any::<u64>(), mask in 1u32..31) {
        let s = random_state(seed, 5);
        let a: Vec<usize> = (0..5).filter(|i| mask >> i & 1 == 1).collect();
        let orders = [0.5, 0.9, 1.0, 1.5, 2.0, 3.0, 10.0];
        let vals: Vec<f64> = orders
            .iter()
            .map(|&o| entropy(&s, &a, if o == 1.0 { Renyi::VonNeumann } else { Renyi::Order(o) }).unwrap().value)
            .collect();
        for w in vals.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9);
        }
    }

    #[test]
    fn strong_subadditivity(seed in any::<u64>(), cut1 in 1usize..4, cut2 in 1usize..4) {
        let s = random_state(seed, 6);
        let a: Vec<usize> = (0..cut1).collect();
        let b: Vec<usize> = (cut1..(cut1 + cut2).min(5)).collect();
        let cc: Vec<usize> = ((cut1 + cut2).min(5)..6).collect();
        let e = |r: &[usize]| entropy(&s, r, Renyi::VonNeumann).unwrap().value;
        let ab: Vec<usize> = a.iter().chain(&b).copied().collect();
        let bc: Vec<usize> = b.iter().chain(&cc).copied().collect();
        let abc: Vec<usize> = (0..6).collect();
        prop_assert!(e(&ab) + e(&bc) - e(&b) - e(&abc) >= -1e-8);
        prop_assert!(mutual_information(&s, &a, &cc, Renyi::VonNeumann).unwrap() >= -1e-9);
    }

    #[test]
    fn purity_matches_renyi_two(seed in any::<u64>()) {
        let s = random_state(seed, 6);
        let p = purity(&s, &[1, 3, 4]).unwrap();
        let s2 = entropy(&s, &[1, 3, 4], Renyi::Order(2.0)).unwrap().value;
        prop_assert!((p.ln() + s2).abs() < 1e-10);
    }

    #[test]
    fn clifford_dense_matches_haar_pipeline(seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = GateEnsemble::Clifford.sample(&mut rng);
        if let Gate::Clifford(c) = &g {
            prop_assert!(g.dense().is_unitary(1e-12));
            let back = circuitlab_core::circuit::CliffordGate::from_unitary(g.dense()).unwrap();
            prop_assert_eq!(back.canonical_key(), c.canonical_key());
        }
    }
}
