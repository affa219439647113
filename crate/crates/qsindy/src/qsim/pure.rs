use num_complex::Complex64;

use super::{Circuit, Gate, GateKind, PauliString};

/// Statevector over `2^n` amplitudes.
#[derive(Clone, Debug)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// |0...0>
    pub fn zero(n_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::ZERO; 1 << n_qubits];
        amplitudes[0] = Complex64::ONE;
        Self {
            n_qubits,
            amplitudes,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<psi|O|psi>`; the imaginary part must vanish and the value is clamped
    /// to [-1, 1] against round-off.
    pub fn expectation(&self, obs: &PauliString) -> f64 {
        assert_eq!(obs.len(), self.n_qubits, "observable length mismatch");
        let mut acc = Complex64::ZERO;
        for (j, amp) in self.amplitudes.iter().enumerate() {
            if *amp == Complex64::ZERO {
                continue;
            }
            let (mapped, phase) = obs.basis_action(j);
            acc += self.amplitudes[mapped].conj() * phase * amp;
        }
        assert!(acc.im.abs() < 1e-10, "expectation not real: {acc}");
        acc.re.clamp(-1.0, 1.0)
    }

    fn apply_single(&mut self, q: usize, u: [[Complex64; 2]; 2]) {
        let bit_pos = self.n_qubits - 1 - q;
        let mask = 1usize << bit_pos;
        for i in 0..self.amplitudes.len() {
            if i & mask == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | mask];
                self.amplitudes[i] = u[0][0] * a0 + u[0][1] * a1;
                self.amplitudes[i | mask] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
    }

    fn apply_gate(&mut self, gate: &Gate) {
        let n = self.n_qubits;
        match gate.kind {
            GateKind::H => {
                let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.apply_single(gate.qubits[0], [[s, s], [s, -s]]);
            }
            GateKind::Rx => {
                let half = gate.angle.unwrap() / 2.0;
                let (c, s) = (half.cos(), half.sin());
                self.apply_single(
                    gate.qubits[0],
                    [
                        [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
                        [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
                    ],
                );
            }
            GateKind::Ry => {
                let half = gate.angle.unwrap() / 2.0;
                let (c, s) = (half.cos(), half.sin());
                self.apply_single(
                    gate.qubits[0],
                    [
                        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
                    ],
                );
            }
            GateKind::Rz => {
                let half = gate.angle.unwrap() / 2.0;
                let phase0 = Complex64::from_polar(1.0, -half);
                let phase1 = Complex64::from_polar(1.0, half);
                self.apply_single(
                    gate.qubits[0],
                    [[phase0, Complex64::ZERO], [Complex64::ZERO, phase1]],
                );
            }
            GateKind::Rzz => {
                let half = gate.angle.unwrap() / 2.0;
                let same = Complex64::from_polar(1.0, -half);
                let diff = Complex64::from_polar(1.0, half);
                let mask_a = 1usize << (n - 1 - gate.qubits[0]);
                let mask_b = 1usize << (n - 1 - gate.qubits[1]);
                for (i, amp) in self.amplitudes.iter_mut().enumerate() {
                    let equal = ((i & mask_a) != 0) == ((i & mask_b) != 0);
                    *amp *= if equal { same } else { diff };
                }
            }
            GateKind::Cnot => {
                let control = 1usize << (n - 1 - gate.qubits[0]);
                let target = 1usize << (n - 1 - gate.qubits[1]);
                for i in 0..self.amplitudes.len() {
                    // visit each swap pair once, from the target-0 side
                    if i & control != 0 && i & target == 0 {
                        self.amplitudes.swap(i, i | target);
                    }
                }
            }
        }
    }
}

/// Applies the circuit to `|0...0>`.
pub fn run_pure(circuit: &Circuit) -> PureState {
    let mut state = PureState::zero(circuit.n_qubits());
    for gate in circuit.gates() {
        state.apply_gate(gate);
    }
    debug_assert!((state.norm_sqr() - 1.0).abs() < 1e-10);
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::PauliOp;
    use std::f64::consts::PI;

    #[test]
    fn empty_circuit_is_ground_state() {
        let state = run_pure(&Circuit::new(2, vec![]));
        assert_eq!(state.amplitudes()[0], Complex64::ONE);
        for k in 1..4 {
            assert_eq!(state.amplitudes()[k], Complex64::ZERO);
        }
    }

    #[test]
    fn hadamard_gives_zero_z_expectation() {
        let state = run_pure(&Circuit::new(2, vec![Gate::h(0)]));
        let z0 = state.expectation(&PauliString::single(2, 0, PauliOp::Z));
        assert!(z0.abs() < 1e-12);
    }

    #[test]
    fn rx_pi_flips_z() {
        let state = run_pure(&Circuit::new(2, vec![Gate::rx(0, PI)]));
        let z0 = state.expectation(&PauliString::single(2, 0, PauliOp::Z));
        assert!((z0 + 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_state_correlations() {
        let state = run_pure(&Circuit::new(2, vec![Gate::h(0), Gate::cnot(0, 1)]));
        let zz = state.expectation(&PauliString::pair(2, 0, 1, PauliOp::Z));
        let z0 = state.expectation(&PauliString::single(2, 0, PauliOp::Z));
        assert!((zz - 1.0).abs() < 1e-12);
        assert!(z0.abs() < 1e-12);
        // amplitude check: (|00> + |11>)/sqrt(2) with qubit 0 as MSB
        let amp = state.amplitudes();
        assert!((amp[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((amp[3].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(amp[1].norm() < 1e-12 && amp[2].norm() < 1e-12);
    }

    #[test]
    fn rzz_matches_cnot_rz_cnot() {
        // the ZZ interaction is often compiled as CNOT / RZ / CNOT
        let theta = 0.83;
        let prep = vec![Gate::rx(0, 0.4), Gate::ry(1, -0.9)];
        let mut native = prep.clone();
        native.push(Gate::rzz(0, 1, theta));
        let mut compiled = prep;
        compiled.push(Gate::cnot(0, 1));
        compiled.push(Gate::rz(1, theta));
        compiled.push(Gate::cnot(0, 1));
        let a = run_pure(&Circuit::new(2, native));
        let b = run_pure(&Circuit::new(2, compiled));
        for op in [PauliOp::X, PauliOp::Y, PauliOp::Z] {
            for q in 0..2 {
                let obs = PauliString::single(2, q, op);
                assert!((a.expectation(&obs) - b.expectation(&obs)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn norm_is_preserved() {
        let gates = vec![
            Gate::h(0),
            Gate::rx(1, 1.3),
            Gate::cnot(0, 2),
            Gate::rzz(1, 2, -0.7),
            Gate::ry(0, 2.1),
            Gate::rz(2, 0.2),
        ];
        let state = run_pure(&Circuit::new(3, gates));
        assert!((state.norm_sqr() - 1.0).abs() < 1e-10);
    }
}
