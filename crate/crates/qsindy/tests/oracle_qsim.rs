//! Oracle equivalence for the circuit simulator: the statevector path
//! against the dense-unitary brute force, and the density path at zero noise
//! against the statevector path.

mod common;

use common::{all_pauli_strings, oracle_expectation, random_circuit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qsindy::feature_maps::{build_circuit, FeatureMapSpec};
use qsindy::qsim::{run_noisy, run_pure, Circuit, Gate, PauliOp, PauliString};

#[test]
fn pure_simulator_matches_dense_oracle_on_100_circuits() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..100 {
        let n_qubits = if trial % 2 == 0 { 2 } else { 3 };
        let circuit = random_circuit(&mut rng, n_qubits, 12);
        let state = run_pure(&circuit);
        for obs in all_pauli_strings(n_qubits) {
            let fast = state.expectation(&obs);
            let slow = oracle_expectation(&circuit, &obs);
            assert!(
                (fast - slow).abs() < 1e-12,
                "trial {trial}: {} mismatch {fast} vs {slow}",
                obs.label()
            );
        }
    }
}

#[test]
fn noiseless_density_matches_pure_on_100_circuits() {
    let mut rng = ChaCha8Rng::seed_from_u64(4048);
    for trial in 0..100 {
        let n_qubits = if trial % 2 == 0 { 2 } else { 3 };
        let circuit = random_circuit(&mut rng, n_qubits, 12);
        let pure = run_pure(&circuit);
        let noisy = run_noisy(&circuit, 0.0);
        for obs in all_pauli_strings(n_qubits) {
            let a = pure.expectation(&obs);
            let b = noisy.expectation(&obs);
            assert!(
                (a - b).abs() < 1e-12,
                "trial {trial}: {} mismatch",
                obs.label()
            );
        }
    }
}

#[test]
fn random_three_qubit_circuit_matches_oracle() {
    // the 10-gate case pinned as an example
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut gates = Vec::new();
    for _ in 0..10 {
        let angle = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let q = rng.random_range(0..3);
        let q2 = (q + 1 + rng.random_range(0..2)) % 3;
        gates.push(match rng.random_range(0..6) {
            0 => Gate::h(q),
            1 => Gate::rx(q, angle),
            2 => Gate::ry(q, angle),
            3 => Gate::rz(q, angle),
            4 => Gate::rzz(q, q2, angle),
            _ => Gate::cnot(q, q2),
        });
    }
    let circuit = Circuit::new(3, gates);
    let state = run_pure(&circuit);
    for obs in all_pauli_strings(3) {
        let fast = state.expectation(&obs);
        let slow = oracle_expectation(&circuit, &obs);
        assert!((fast - slow).abs() < 1e-12);
    }
}

#[test]
fn iqp_at_origin_matches_oracle() {
    let spec = FeatureMapSpec::iqp();
    let circuit = build_circuit(&spec, &[0.0, 0.0]).unwrap();
    let state = run_pure(&circuit);
    for obs in [
        PauliString::single(2, 0, PauliOp::X),
        PauliString::single(2, 1, PauliOp::X),
    ] {
        let fast = state.expectation(&obs);
        let slow = oracle_expectation(&circuit, &obs);
        assert!((fast - slow).abs() < 1e-12);
    }
    // the two single-qubit X expectations agree by symmetry
    let x0 = state.expectation(&PauliString::single(2, 0, PauliOp::X));
    let x1 = state.expectation(&PauliString::single(2, 1, PauliOp::X));
    assert!((x0 - x1).abs() < 1e-12);
}

#[test]
fn depolarizing_contracts_zz_map_expectations() {
    // the ZZ encoding circuit at p = 0.02: every observable shrinks in
    // magnitude relative to the clean run, across 50 random inputs
    let mut rng = ChaCha8Rng::seed_from_u64(555);
    let spec = FeatureMapSpec::zz2();
    for _ in 0..50 {
        let x = [rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)];
        let circuit = build_circuit(&spec, &x).unwrap();
        let clean = run_pure(&circuit);
        let noisy = run_noisy(&circuit, 0.02);
        for obs in spec.observables() {
            let a = clean.expectation(&obs);
            let b = noisy.expectation(&obs);
            assert!(
                b.abs() <= a.abs() + 1e-12,
                "{} grew: {a} -> {b}",
                obs.label()
            );
        }
    }
}
