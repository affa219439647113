use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Circuit, Gate, GateKind, PauliOp, PauliString};

/// Mixed state as a full `2^n x 2^n` density matrix.
#[derive(Clone, Debug)]
pub struct DensityState {
    n_qubits: usize,
    rho: DMatrix<Complex64>,
}

impl DensityState {
    /// |0..0><0..0|
    pub fn zero(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        let mut rho = DMatrix::zeros(dim, dim);
        rho[(0, 0)] = Complex64::ONE;
        Self { n_qubits, rho }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn rho(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.diagonal().sum()
    }

    /// Checks Hermiticity, unit trace, and positive semidefiniteness
    /// (eigenvalues >= -1e-9). Panics on violation: these are structural
    /// invariants of channel evolution, not data errors.
    pub fn assert_valid(&self) {
        let dim = self.rho.nrows();
        for i in 0..dim {
            for j in 0..dim {
                let diff = (self.rho[(i, j)] - self.rho[(j, i)].conj()).norm();
                assert!(diff < 1e-10, "rho not Hermitian at ({i},{j}): {diff:e}");
            }
        }
        let tr = self.trace();
        assert!(
            (tr.re - 1.0).abs() < 1e-10 && tr.im.abs() < 1e-10,
            "trace {tr}"
        );
        let eig = nalgebra::SymmetricEigen::new(self.rho.clone());
        for ev in eig.eigenvalues.iter() {
            assert!(*ev >= -1e-9, "negative eigenvalue {ev:e}");
        }
    }

    /// `Tr(rho O)`; clamped to [-1, 1] against round-off.
    pub fn expectation(&self, obs: &PauliString) -> f64 {
        assert_eq!(obs.len(), self.n_qubits, "observable length mismatch");
        let mut acc = Complex64::ZERO;
        for j in 0..self.rho.nrows() {
            let (mapped, phase) = obs.basis_action(j);
            acc += phase * self.rho[(j, mapped)];
        }
        assert!(acc.im.abs() < 1e-10, "expectation not real: {acc}");
        acc.re.clamp(-1.0, 1.0)
    }

    fn conjugate_by(&mut self, u: &DMatrix<Complex64>) {
        self.rho = u * &self.rho * u.adjoint();
    }

    /// Single-qubit depolarizing channel on qubit `q`:
    /// `rho -> (1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z)`.
    pub fn depolarize(&mut self, q: usize, p: f64) {
        assert!((0.0..=1.0).contains(&p));
        if p == 0.0 {
            return;
        }
        let n = self.n_qubits;
        let mut mixed = DMatrix::zeros(self.rho.nrows(), self.rho.ncols());
        for op in [PauliOp::X, PauliOp::Y, PauliOp::Z] {
            let pauli = embedded_pauli(n, q, op);
            mixed += &pauli * &self.rho * &pauli;
        }
        self.rho = self.rho.scale(1.0 - p) + mixed.scale(p / 3.0);
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Full-space matrix of a single Pauli on qubit `q` (Paulis are Hermitian, so
/// conjugation needs no adjoint).
fn embedded_pauli(n_qubits: usize, q: usize, op: PauliOp) -> DMatrix<Complex64> {
    let dim = 1 << n_qubits;
    let mut m = DMatrix::zeros(dim, dim);
    let obs = PauliString::single(n_qubits, q, op);
    for j in 0..dim {
        let (mapped, phase) = obs.basis_action(j);
        m[(mapped, j)] = phase;
    }
    m
}

/// Full-space unitary of a gate, built from its action on basis states.
fn gate_matrix(gate: &Gate, n_qubits: usize) -> DMatrix<Complex64> {
    let dim = 1 << n_qubits;
    let mut m = DMatrix::zeros(dim, dim);
    match gate.kind {
        GateKind::H | GateKind::Rx | GateKind::Ry | GateKind::Rz => {
            let u: [[Complex64; 2]; 2] = match gate.kind {
                GateKind::H => {
                    let s = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                    [[s, s], [s, -s]]
                }
                GateKind::Rx => {
                    let half = gate.angle.unwrap() / 2.0;
                    [
                        [c(half.cos(), 0.0), c(0.0, -half.sin())],
                        [c(0.0, -half.sin()), c(half.cos(), 0.0)],
                    ]
                }
                GateKind::Ry => {
                    let half = gate.angle.unwrap() / 2.0;
                    [
                        [c(half.cos(), 0.0), c(-half.sin(), 0.0)],
                        [c(half.sin(), 0.0), c(half.cos(), 0.0)],
                    ]
                }
                GateKind::Rz => {
                    let half = gate.angle.unwrap() / 2.0;
                    [
                        [Complex64::from_polar(1.0, -half), Complex64::ZERO],
                        [Complex64::ZERO, Complex64::from_polar(1.0, half)],
                    ]
                }
                _ => unreachable!(),
            };
            let mask = 1usize << (n_qubits - 1 - gate.qubits[0]);
            for j in 0..dim {
                let bit = usize::from(j & mask != 0);
                // column j: U|bit> contributions
                m[(j & !mask, j)] += u[0][bit];
                m[(j | mask, j)] += u[1][bit];
            }
        }
        GateKind::Rzz => {
            let half = gate.angle.unwrap() / 2.0;
            let mask_a = 1usize << (n_qubits - 1 - gate.qubits[0]);
            let mask_b = 1usize << (n_qubits - 1 - gate.qubits[1]);
            for j in 0..dim {
                let equal = ((j & mask_a) != 0) == ((j & mask_b) != 0);
                m[(j, j)] = Complex64::from_polar(1.0, if equal { -half } else { half });
            }
        }
        GateKind::Cnot => {
            let control = 1usize << (n_qubits - 1 - gate.qubits[0]);
            let target = 1usize << (n_qubits - 1 - gate.qubits[1]);
            for j in 0..dim {
                let out = if j & control != 0 { j ^ target } else { j };
                m[(out, j)] = Complex64::ONE;
            }
        }
    }
    m
}

/// Density-matrix evolution of the circuit from `|0..0><0..0|`, applying the
/// single-qubit depolarizing channel of strength `p` to every qubit a gate
/// touches, immediately after that gate.
pub fn run_noisy(circuit: &Circuit, p: f64) -> DensityState {
    assert!((0.0..=1.0).contains(&p), "p must lie in [0, 1]");
    let mut state = DensityState::zero(circuit.n_qubits());
    for gate in circuit.gates() {
        let u = gate_matrix(gate, circuit.n_qubits());
        state.conjugate_by(&u);
        for &q in &gate.qubits {
            state.depolarize(q, p);
        }
    }
    state
}
