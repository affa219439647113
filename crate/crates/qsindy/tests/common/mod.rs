//! Brute-force dense-matrix oracle for circuit expectations, shared by the
//! oracle suite and the acceptance suite. Hand-rolled complex matrices with
//! no code in common with the simulator under test.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qsindy::qsim::{Circuit, Gate, GateKind, PauliOp, PauliString};

pub type Mat = Vec<Vec<Complex64>>;

pub fn zeros(n: usize) -> Mat {
    vec![vec![Complex64::ZERO; n]; n]
}

pub fn eye(n: usize) -> Mat {
    let mut m = zeros(n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::ONE;
    }
    m
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == Complex64::ZERO {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (na, nb) = (a.len(), b.len());
    let mut out = zeros(na * nb);
    for i in 0..na {
        for j in 0..na {
            for k in 0..nb {
                for l in 0..nb {
                    out[i * nb + k][j * nb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn single_qubit_matrix(kind: GateKind, angle: Option<f64>) -> Mat {
    match kind {
        GateKind::H => {
            let s = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            vec![vec![s, s], vec![s, -s]]
        }
        GateKind::Rx => {
            let h = angle.unwrap() / 2.0;
            vec![
                vec![c(h.cos(), 0.0), c(0.0, -h.sin())],
                vec![c(0.0, -h.sin()), c(h.cos(), 0.0)],
            ]
        }
        GateKind::Ry => {
            let h = angle.unwrap() / 2.0;
            vec![
                vec![c(h.cos(), 0.0), c(-h.sin(), 0.0)],
                vec![c(h.sin(), 0.0), c(h.cos(), 0.0)],
            ]
        }
        GateKind::Rz => {
            let h = angle.unwrap() / 2.0;
            vec![
                vec![Complex64::from_polar(1.0, -h), Complex64::ZERO],
                vec![Complex64::ZERO, Complex64::from_polar(1.0, h)],
            ]
        }
        _ => unreachable!(),
    }
}

pub fn pauli_matrix(op: PauliOp) -> Mat {
    match op {
        PauliOp::I => eye(2),
        PauliOp::X => vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ],
        PauliOp::Y => vec![
            vec![c(0.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ],
        PauliOp::Z => vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
        ],
    }
}

/// Embeds a gate into the full space (qubit 0 = leftmost kron factor = most
/// significant bit of the basis index).
pub fn full_gate_matrix(gate: &Gate, n_qubits: usize) -> Mat {
    match gate.kind {
        GateKind::H | GateKind::Rx | GateKind::Ry | GateKind::Rz => {
            let u = single_qubit_matrix(gate.kind, gate.angle);
            let mut m = vec![vec![Complex64::ONE]];
            for q in 0..n_qubits {
                let factor = if q == gate.qubits[0] {
                    u.clone()
                } else {
                    eye(2)
                };
                m = kron(&m, &factor);
            }
            m
        }
        GateKind::Rzz => {
            let h = gate.angle.unwrap() / 2.0;
            let dim = 1 << n_qubits;
            let mut m = zeros(dim);
            for (j, row) in m.iter_mut().enumerate() {
                let bit = |q: usize| (j >> (n_qubits - 1 - q)) & 1;
                let zz = if bit(gate.qubits[0]) == bit(gate.qubits[1]) {
                    1.0
                } else {
                    -1.0
                };
                row[j] = Complex64::from_polar(1.0, -h * zz);
            }
            m
        }
        GateKind::Cnot => {
            let dim = 1 << n_qubits;
            let mut m = zeros(dim);
            // column j maps basis state j to `out`, which may be a different row
            #[allow(clippy::needless_range_loop)]
            for j in 0..dim {
                let control = (j >> (n_qubits - 1 - gate.qubits[0])) & 1;
                let out = if control == 1 {
                    j ^ (1 << (n_qubits - 1 - gate.qubits[1]))
                } else {
                    j
                };
                m[out][j] = Complex64::ONE;
            }
            m
        }
    }
}

/// `<0| U^dag O U |0>` computed through dense matrix algebra.
pub fn oracle_expectation(circuit: &Circuit, obs: &PauliString) -> f64 {
    let dim = circuit.dim();
    let mut unitary = eye(dim);
    for gate in circuit.gates() {
        unitary = matmul(&full_gate_matrix(gate, circuit.n_qubits()), &unitary);
    }
    let mut full_obs = vec![vec![Complex64::ONE]];
    for op in obs.factors() {
        full_obs = kron(&full_obs, &pauli_matrix(*op));
    }
    let psi: Vec<Complex64> = (0..dim).map(|i| unitary[i][0]).collect();
    let mut acc = Complex64::ZERO;
    for i in 0..dim {
        for j in 0..dim {
            acc += psi[i].conj() * full_obs[i][j] * psi[j];
        }
    }
    assert!(acc.im.abs() < 1e-12);
    acc.re
}

pub fn random_circuit(rng: &mut ChaCha8Rng, n_qubits: usize, max_gates: usize) -> Circuit {
    let n_gates = rng.random_range(1..=max_gates);
    let mut gates = Vec::new();
    for _ in 0..n_gates {
        let angle = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let q = rng.random_range(0..n_qubits);
        let mut q2 = rng.random_range(0..n_qubits);
        while q2 == q {
            q2 = rng.random_range(0..n_qubits);
        }
        gates.push(match rng.random_range(0..6) {
            0 => Gate::h(q),
            1 => Gate::rx(q, angle),
            2 => Gate::ry(q, angle),
            3 => Gate::rz(q, angle),
            4 => Gate::rzz(q, q2, angle),
            _ => Gate::cnot(q, q2),
        });
    }
    Circuit::new(n_qubits, gates)
}

pub fn all_pauli_strings(n_qubits: usize) -> Vec<PauliString> {
    let ops = [PauliOp::I, PauliOp::X, PauliOp::Y, PauliOp::Z];
    let mut out = Vec::new();
    for code in 0..4usize.pow(n_qubits as u32) {
        let mut factors = Vec::with_capacity(n_qubits);
        let mut rem = code;
        for _ in 0..n_qubits {
            factors.push(ops[rem % 4]);
            rem /= 4;
        }
        out.push(PauliString::new(factors));
    }
    out
}
