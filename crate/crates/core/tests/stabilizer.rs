mod common;

use std::collections::BTreeSet;

use circuitlab_core::circuit::{build_brickwork, Boundary, GateEnsemble};
use circuitlab_core::pauli::{Pauli, PauliString};
use circuitlab_core::rng::{stream, Purpose};
use circuitlab_core::stabilizer::*;
use circuitlab_core::statevector::{entropy, PureState, Renyi};
use circuitlab_core::Error;
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn ps(s: &str) -> PauliString {
    s.parse().unwrap()
}

fn generator_set(t: &Tableau) -> BTreeSet<String> {
    t.stabilizers().iter().map(|p| p.to_string()).collect()
}

#[test]
fn initial_states() {
    let t = Tableau::new(3, &InitialState::AllUp).unwrap();
    assert_eq!(generator_set(&t), ["+ZII", "+IZI", "+IIZ"].map(String::from).into());
    let t = Tableau::new(64, &InitialState::MaximallyMixed).unwrap();
    assert_eq!(t.rank(), 0);
    assert_eq!(t.entropy(&(0..64).collect::<Vec<_>>()).unwrap(), 64);
    assert_eq!(t.purification_entropy(), 64);
    assert_eq!(Tableau::new(5, &InitialState::AllPlus).unwrap().purification_entropy(), 0);
    t.check_invariants().unwrap();
}

#[test]
fn glassy_state_is_a_cat_state() {
    let t = Tableau::new(4, &InitialState::Glassy(vec![1, -1, 1])).unwrap();
    t.check_invariants().unwrap();
    let dense = stabilizer_state(&t.stabilizers());
    let a = dense.amplitudes();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // Spins (+,+,−,−) and their global flip.
    for (i, z) in a.iter().enumerate() {
        let expect = if i == 0b0011 || i == 0b1100 { h } else { 0.0 };
        assert!((z.norm() - expect).abs() < 1e-12, "amp {i:04b} = {z}");
    }
    assert!((a[0b0011] - a[0b1100]).norm() < 1e-12);
    assert!(matches!(Tableau::new(4, &InitialState::Glassy(vec![1, 1])), Err(Error::InvalidParameter(_))));
}

#[test]
fn cz_on_plus_states() {
    let mut t = Tableau::new(2, &InitialState::AllPlus).unwrap();
    t.cz(0, 1).unwrap();
    assert_eq!(generator_set(&t), ["+XZ", "+ZX"].map(String::from).into());
    let mut h = Tableau::new(1, &InitialState::AllUp).unwrap();
    h.h(0).unwrap();
    assert_eq!(generator_set(&h), ["+X".to_string()].into());
    h.s(0).unwrap();
    assert_eq!(generator_set(&h), ["+Y".to_string()].into());
}

#[test]
fn measurement_cases() {
    let mut rng = stream(1, Purpose::Outcomes);
    let mut t = Tableau::new(3, &InitialState::AllUp).unwrap();
    let m = t.measure_pauli(&ps("ZII"), &mut rng).unwrap();
    assert_eq!((m.outcome, m.kind), (1, MeasureKind::Deterministic));
    let m = t.measure_pauli(&ps("-IZZ"), &mut rng).unwrap();
    assert_eq!((m.outcome, m.kind), (-1, MeasureKind::Deterministic));

    let mut plus_count = 0;
    for _ in 0..2000 {
        let mut t = Tableau::new(2, &InitialState::AllPlus).unwrap();
        t.cz(0, 1).unwrap();
        let m = t.measure_pauli(&ps("XI"), &mut rng).unwrap();
        assert_eq!(m.kind, MeasureKind::Random);
        if m.outcome == 1 {
            plus_count += 1;
            assert_eq!(t.expectation(&ps("XI")).unwrap(), 1);
            assert_eq!(t.expectation(&ps("IZ")).unwrap(), 1);
        } else {
            assert_eq!(t.expectation(&ps("XI")).unwrap(), -1);
            assert_eq!(t.expectation(&ps("IZ")).unwrap(), -1);
        }
    }
    // Binomial(2000, 1/2): 4σ ≈ 89.
    assert!((plus_count as i64 - 1000).abs() < 90);

    let mut t = Tableau::new(4, &InitialState::MaximallyMixed).unwrap();
    let m = t.measure_pauli(&ps("ZIII"), &mut rng).unwrap();
    assert_eq!(m.kind, MeasureKind::Purifying);
    assert_eq!(t.rank(), 1);
    t.check_invariants().unwrap();
    assert!(matches!(t.measure_pauli(&ps("ZZ"), &mut rng), Err(Error::MalformedPauli(_))));
    assert!(matches!(t.measure_pauli(&ps("IIII"), &mut rng), Err(Error::MalformedPauli(_))));
}

#[test]
fn entropy_examples() {
    let mut bell = Tableau::from_stabilizers(2, &[ps("XX"), ps("ZZ")]).unwrap();
    assert_eq!(bell.entropy(&[0]).unwrap(), 1);
    assert_eq!(bell.entropy(&[1]).unwrap(), 1);
    assert_eq!(bell.entropy(&[0, 1]).unwrap(), 0);
    let prod = Tableau::new(6, &InitialState::AllPlus).unwrap();
    for r in contiguous_regions(6) {
        assert_eq!(prod.entropy(&r).unwrap(), 0);
    }
    assert_eq!(delta_s_profile(&prod, &[0, 1, 2], &mut stream(0, Purpose::Outcomes)).unwrap(), vec![0, 0, 0]);
    assert_eq!(delta_s_profile(&bell, &[0], &mut stream(0, Purpose::Outcomes)).unwrap(), vec![1]);
    bell.measure_z(0, &mut stream(0, Purpose::Outcomes)).unwrap();
    assert_eq!(bell.entropy(&[0]).unwrap(), 0);
    assert!(Tableau::from_stabilizers(2, &[ps("XX"), ps("ZI")]).is_err());
    assert!(Tableau::from_stabilizers(2, &[ps("XX"), ps("XX")]).is_err());
}

#[test]
fn from_stabilizers_supports_mixed_states() {
    let t = Tableau::from_stabilizers(4, &[ps("ZZII"), ps("-IIXX")]).unwrap();
    assert_eq!(t.rank(), 2);
    assert_eq!(t.expectation(&ps("-IIXX")).unwrap(), 1);
    assert_eq!(t.expectation(&ps("ZZII")).unwrap(), 1);
    assert_eq!(t.expectation(&ps("IIIZ")).unwrap(), 0);
    assert_eq!(t.purification_entropy(), 2);
}

#[test]
fn cross_engine_unitary_clifford_circuits() {
    let mut rng = stream(31, Purpose::Circuit);
    for _ in 0..100 {
        let c = build_brickwork(8, 8, Boundary::Open, &GateEnsemble::Clifford, &mut rng).unwrap();
        let mut t = Tableau::new(8, &InitialState::AllUp).unwrap();
        t.run_circuit(&c, &mut rng).unwrap();
        let mut s = PureState::all_up(8);
        s.run_circuit(&c, &mut rng).unwrap();
        assert!(max_entropy_mismatch(&t, &s) < 1e-9);
        // Same state up to phase.
        assert!(stabilizer_state(&t.stabilizers()).overlap(&s) > 1.0 - 1e-9);
    }
}

#[test]
fn cross_engine_hybrid_circuits() {
    let mut rng = stream(32, Purpose::Circuit);
    for _ in 0..100 {
        let c = random_hybrid(8, 8, 0.25, &mut rng);
        let mut t = Tableau::new(8, &InitialState::AllUp).unwrap();
        let outcomes = t.run_circuit(&c, &mut rng).unwrap();
        t.check_invariants().unwrap();
        let s = replay_dense(&c, &outcomes);
        assert!(max_entropy_mismatch(&t, &s) < 1e-9);
        assert!(stabilizer_state(&t.stabilizers()).overlap(&s) > 1.0 - 1e-9);
    }
}

#[test]
fn mixed_state_entropy_matches_purified_oracle() {
    // A maximally mixed system is the reduction of Bell pairs with a
    // reference; entropies of system regions must agree.
    let n = 6;
    let mut rng = stream(33, Purpose::Circuit);
    for _ in 0..30 {
        let c = random_hybrid(n, 6, 0.2, &mut rng);
        let mut mixed = Tableau::new(n, &InitialState::MaximallyMixed).unwrap();
        let mut pure = Tableau::new(2 * n, &InitialState::AllUp).unwrap();
        for i in 0..n {
            pure.h(i).unwrap();
            pure.cnot(i, n + i).unwrap();
        }
        let mut wide = circuitlab_core::circuit::Circuit::new(
            2 * n,
            2,
            Boundary::Open,
            circuitlab_core::circuit::Geometry::Custom,
        );
        for l in &c.layers {
            wide.push_layer(l.clone()).unwrap();
        }
        mixed.run_circuit(&c, &mut rng).unwrap();
        pure.run_circuit(&wide, &mut rng).unwrap();
        mixed.check_invariants().unwrap();
        for mask in 1u32..1 << n {
            let a: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            assert_eq!(mixed.entropy(&a).unwrap(), pure.entropy(&a).unwrap(), "region {a:?}");
        }
        assert_eq!(mixed.purification_entropy(), pure.entropy(&(0..n).collect::<Vec<_>>()).unwrap());
    }
}

#[test]
fn hybrid_limits() {
    let mut rng = stream(34, Purpose::Circuit);
    let n = 16;
    let mut mean = 0.0;
    for _ in 0..20 {
        let mut t = Tableau::new(n, &InitialState::AllUp).unwrap();
        let r = run_hybrid(&mut t, &HybridParams::new(4 * n, 0.0, Boundary::Periodic), &mut rng).unwrap();
        mean += r.half_entropy[0] / 20.0;
        assert!(r.half_entropy[0] <= (n / 2) as f64);
    }
    assert!(mean > (n / 2) as f64 - 1.5, "mean saturated entropy {mean}");

    let mut t = Tableau::new(n, &InitialState::AllUp).unwrap();
    let mut params = HybridParams::new(10, 1.0, Boundary::Periodic);
    params.checkpoints = (1..=10).collect();
    let r = run_hybrid(&mut t, &params, &mut rng).unwrap();
    assert!(r.half_entropy.iter().all(|&s| s == 0.0));
    assert!(run_hybrid(&mut t, &HybridParams::new(1, 1.5, Boundary::Periodic), &mut rng).is_err());
}

#[test]
fn purification_in_the_area_law_phase() {
    let n = 64;
    let mut rng = stream(35, Purpose::Circuit);
    let purified = (0..200)
        .filter(|_| {
            let mut t = Tableau::new(n, &InitialState::MaximallyMixed).unwrap();
            let r = run_hybrid(&mut t, &HybridParams::new(4 * n, 0.4, Boundary::Periodic), &mut rng).unwrap();
            r.purification[0] == 0.0
        })
        .count();
    assert!(purified >= 198, "{purified} of 200 purified");
}

#[test]
fn tmi_examples() {
    let prod = Tableau::new(8, &InitialState::AllUp).unwrap();
    assert_eq!(tmi_quarters(&prod).unwrap(), 0);

    // GHZ on 8 qubits, checked against dense entropies.
    let mut ghz = Tableau::new(8, &InitialState::AllUp).unwrap();
    ghz.h(0).unwrap();
    for i in 1..8 {
        ghz.cnot(0, i).unwrap();
    }
    let dense = stabilizer_state(&ghz.stabilizers());
    let s = |r: Vec<usize>| entropy(&dense, &r, Renyi::VonNeumann).unwrap().value / std::f64::consts::LN_2;
    let (a, b, c) = (vec![0, 1], vec![2, 3], vec![4, 5]);
    let cat = |x: &[usize], y: &[usize]| [x, y].concat();
    let oracle = s(a.clone()) + s(b.clone()) + s(c.clone())
        - s(cat(&a, &b))
        - s(cat(&a, &c))
        - s(cat(&b, &c))
        + s([a.clone(), b.clone(), c.clone()].concat());
    assert_eq!(tmi_quarters(&ghz).unwrap() as f64, oracle.round());
    assert!(tmi_quarters(&Tableau::new(6, &InitialState::AllUp).unwrap()).is_err());
}

#[test]
fn volume_law_tmi_is_negative_and_extensive() {
    let mut rng = stream(36, Purpose::Circuit);
    let mut mean = |n: usize| {
        let runs = 40;
        (0..runs)
            .map(|_| {
                let mut t = Tableau::new(n, &InitialState::AllUp).unwrap();
                let mut p = HybridParams::new(4 * n, 0.0, Boundary::Periodic);
                p.record_tmi = true;
                run_hybrid(&mut t, &p, &mut rng).unwrap().tmi[0]
            })
            .sum::<f64>()
            / runs as f64
    };
    let (m16, m32) = (mean(16), mean(32));
    assert!(m16 < 0.0 && m32 < 0.0);
    let ratio = m32 / m16;
    assert!((1.5..2.5).contains(&ratio), "TMI ratio {ratio} ({m16}, {m32})");
}

#[test]
fn reference_qubit_limits() {
    let mut rng = stream(37, Purpose::Circuit);
    let s = reference_qubit_run(16, 0.0, 32, Boundary::Periodic, &mut rng).unwrap();
    assert!(s.iter().all(|&v| v == 1.0));
    let s = reference_qubit_run(16, 1.0, 4, Boundary::Periodic, &mut rng).unwrap();
    assert_eq!(s[0], 1.0);
    assert!(s[1..].iter().all(|&v| v == 0.0));
}

#[test]
fn measurement_only_limits() {
    let mut rng = stream(38, Purpose::Circuit);
    let n = 16;
    let params = |p_z| IsingParams { n, p_z, time: 40, boundary: Boundary::Periodic, checkpoints: vec![40] };
    let r = measurement_only_ising(&params(1.0), &mut rng).unwrap();
    assert_eq!(r.chi[0], 1.0);
    let r = measurement_only_ising(&params(0.0), &mut rng).unwrap();
    assert_eq!(r.chi[0], 1.0 / n as f64);
    // χ agrees with brute-force expectation values.
    let r = measurement_only_ising(&params(0.6), &mut rng).unwrap();
    let mut brute = 0.0;
    for i in 0..n {
        for j in 0..n {
            // Z_i Z_i = 1 contributes the diagonal.
            let mut p = PauliString::identity(n);
            if i != j {
                p.ops[i] = Pauli::Z;
                p.ops[j] = Pauli::Z;
            }
            let e = r.tableau.expectation(&p).unwrap() as f64;
            brute += e * e;
        }
    }
    assert!((r.chi[0] - brute / (n * n) as f64).abs() < 1e-12);
}

#[test]
fn snapshot_round_trip() {
    let mut rng = stream(39, Purpose::Circuit);
    let mut t = Tableau::new(70, &InitialState::MaximallyMixed).unwrap();
    let mut p = HybridParams::new(10, 0.2, Boundary::Open);
    p.checkpoints = vec![];
    run_hybrid(&mut t, &p, &mut rng).unwrap();
    let text = t.snapshot();
    assert_eq!(Tableau::from_snapshot(&text).unwrap(), t);
    assert!(Tableau::from_snapshot("tableau L=2 k=3\n").is_err());
    let golden = "tableau L=2 k=2\n+ 0000000000000001 0000000000000000\n+ 0000000000000002 0000000000000000\n\
                  + 0000000000000000 0000000000000001\n+ 0000000000000000 0000000000000002\n";
    assert_eq!(Tableau::new(2, &InitialState::AllUp).unwrap().snapshot(), golden);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pure_entropy_is_complement_symmetric(seed in any::<u64>(), mask in any::<u16>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let c = random_hybrid(12, 6, 0.1, &mut rng);
        let mut t = Tableau::new(12, &InitialState::AllUp).unwrap();
        t.run_circuit(&c, &mut rng).unwrap();
        let a: Vec<usize> = (0..12).filter(|i| mask >> i & 1 == 1).collect();
        let b: Vec<usize> = (0..12).filter(|i| mask >> i & 1 == 0).collect();
        prop_assert_eq!(t.entropy(&a).unwrap(), t.entropy(&b).unwrap());
    }

    #[test]
    fn deterministic_measurements_are_idempotent(seed in any::<u64>(), site in 0usize..10, basis in 1u8..4) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let c = random_hybrid(10, 5, 0.2, &mut rng);
        let mut t = Tableau::new(10, &InitialState::MaximallyMixed).unwrap();
        t.run_circuit(&c, &mut rng).unwrap();
        let p = PauliString::single(10, site, Pauli::from_code(basis));
        let first = t.measure_pauli(&p, &mut rng).unwrap();
        let snapshot = t.clone();
        let second = t.measure_pauli(&p, &mut rng).unwrap();
        prop_assert_eq!(second.kind, MeasureKind::Deterministic);
        prop_assert_eq!(first.outcome, second.outcome);
        prop_assert_eq!(t, snapshot);
    }

    #[test]
    fn rank_never_decreases(seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut t = Tableau::new(9, &InitialState::MaximallyMixed).unwrap();
        let mut k = 0;
        for _ in 0..60 {
            let mut p = PauliString::identity(9);
            for op in p.ops.iter_mut() {
                *op = Pauli::from_code(rng.random_range(0..4));
            }
            if p.is_identity() {
                continue;
            }
            if rng.random::<bool>() {
                let g = GateEnsemble::Clifford.sample(&mut rng);
                let a = rng.random_range(0..8);
                t.apply_gate(&g, &[a, a + 1]).unwrap();
            }
            t.measure_pauli(&p, &mut rng).unwrap();
            prop_assert!(t.rank() >= k);
            k = t.rank();
        }
        t.check_invariants().unwrap();
    }

    #[test]
    fn runs_depend_only_on_the_seed(seed in any::<u64>()) {
        let run = || {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut t = Tableau::new(20, &InitialState::AllUp).unwrap();
            let r = run_hybrid(&mut t, &HybridParams::new(20, 0.15, Boundary::Periodic), &mut rng).unwrap();
            (t, r)
        };
        prop_assert_eq!(run(), run());
    }
}

#[test]
fn table_sampler_reproduces_sample2() {
    use circuitlab_core::circuit::{CliffordGate, CliffordTable2};
    let mut a = stream(77, Purpose::Circuit);
    let mut b = stream(77, Purpose::Circuit);
    for _ in 0..500 {
        let g = CliffordGate::sample2(&mut a);
        let t = CliffordTable2::sample(&mut b);
        assert_eq!(CliffordTable2::from_gate(&g), Some(t));
        for p in 0..16u8 {
            assert_eq!(g.conjugate(p), t.image(p));
        }
    }
}
