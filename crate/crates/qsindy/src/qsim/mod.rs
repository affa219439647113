//! Exact simulation of 2-3 qubit circuits: statevector evolution, density
//! matrix evolution with per-gate depolarizing noise, and Pauli-string
//! expectation values.
//!
//! Conventions, fixed for reproducibility:
//! - rotations use the half-angle form, e.g. `RX(theta) = exp(-i theta X / 2)`;
//! - qubit 0 is the most significant bit of the amplitude index, so for two
//!   qubits the basis order is `|00>, |01>, |10>, |11>` with qubit 0 first.

mod density;
mod pure;

pub use density::{run_noisy, DensityState};
pub use pure::{run_pure, PureState};

/// Gate vocabulary. `Rzz` and `Cnot` act on two qubits, the rest on one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind {
    H,
    Rx,
    Ry,
    Rz,
    Rzz,
    Cnot,
}

#[derive(Clone, Debug)]
pub struct Gate {
    pub kind: GateKind,
    /// Target indices; for `Cnot` the first entry is the control.
    pub qubits: Vec<usize>,
    /// Rotation angle in radians; `None` for H and CNOT.
    pub angle: Option<f64>,
}

impl Gate {
    pub fn h(q: usize) -> Self {
        Self {
            kind: GateKind::H,
            qubits: vec![q],
            angle: None,
        }
    }
    pub fn rx(q: usize, angle: f64) -> Self {
        Self {
            kind: GateKind::Rx,
            qubits: vec![q],
            angle: Some(angle),
        }
    }
    pub fn ry(q: usize, angle: f64) -> Self {
        Self {
            kind: GateKind::Ry,
            qubits: vec![q],
            angle: Some(angle),
        }
    }
    pub fn rz(q: usize, angle: f64) -> Self {
        Self {
            kind: GateKind::Rz,
            qubits: vec![q],
            angle: Some(angle),
        }
    }
    pub fn rzz(a: usize, b: usize, angle: f64) -> Self {
        Self {
            kind: GateKind::Rzz,
            qubits: vec![a, b],
            angle: Some(angle),
        }
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Self {
            kind: GateKind::Cnot,
            qubits: vec![control, target],
            angle: None,
        }
    }

    fn arity(&self) -> usize {
        match self.kind {
            GateKind::Rzz | GateKind::Cnot => 2,
            _ => 1,
        }
    }

    fn takes_angle(&self) -> bool {
        !matches!(self.kind, GateKind::H | GateKind::Cnot)
    }
}

/// An ordered gate list on 2 or 3 qubits.
#[derive(Clone, Debug)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    /// Validates qubit counts, gate arities, and the gate-count sanity bound.
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Self {
        assert!((2..=3).contains(&n_qubits), "circuits are 2 or 3 qubits");
        assert!(gates.len() <= 64, "gate count exceeds the sanity bound");
        for gate in &gates {
            assert_eq!(
                gate.qubits.len(),
                gate.arity(),
                "{:?}: wrong qubit count",
                gate.kind
            );
            assert_eq!(
                gate.angle.is_some(),
                gate.takes_angle(),
                "{:?}: angle mismatch",
                gate.kind
            );
            for &q in &gate.qubits {
                assert!(q < n_qubits, "qubit index {q} out of range");
            }
            if gate.qubits.len() == 2 {
                assert_ne!(
                    gate.qubits[0], gate.qubits[1],
                    "two-qubit gate needs distinct qubits"
                );
            }
        }
        Self { n_qubits, gates }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }
}

/// One Pauli letter per qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

/// A tensor product of Pauli factors, one per qubit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliString {
    factors: Vec<PauliOp>,
}

impl PauliString {
    pub fn new(factors: Vec<PauliOp>) -> Self {
        assert!(!factors.is_empty());
        Self { factors }
    }

    /// Single-qubit operator `op` on qubit `q`, identity elsewhere.
    pub fn single(n_qubits: usize, q: usize, op: PauliOp) -> Self {
        let mut factors = vec![PauliOp::I; n_qubits];
        factors[q] = op;
        Self { factors }
    }

    /// Two-qubit correlator `op` on qubits `a` and `b`, identity elsewhere.
    pub fn pair(n_qubits: usize, a: usize, b: usize, op: PauliOp) -> Self {
        assert_ne!(a, b);
        let mut factors = vec![PauliOp::I; n_qubits];
        factors[a] = op;
        factors[b] = op;
        Self { factors }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[PauliOp] {
        &self.factors
    }

    /// Name like `Z0`, `X0X1`, or `I` for the identity string.
    pub fn label(&self) -> String {
        let mut s = String::new();
        for (q, op) in self.factors.iter().enumerate() {
            match op {
                PauliOp::I => {}
                PauliOp::X => s.push_str(&format!("X{q}")),
                PauliOp::Y => s.push_str(&format!("Y{q}")),
                PauliOp::Z => s.push_str(&format!("Z{q}")),
            }
        }
        if s.is_empty() {
            s.push('I');
        }
        s
    }

    /// Action on a computational basis state: `O|j> = phase * |mapped>`.
    /// Returns (mapped index, phase as (re, im)).
    pub(crate) fn basis_action(&self, j: usize) -> (usize, num_complex::Complex64) {
        use num_complex::Complex64;
        let n = self.factors.len();
        let mut mapped = j;
        let mut phase = Complex64::new(1.0, 0.0);
        for (q, op) in self.factors.iter().enumerate() {
            let bit_pos = n - 1 - q; // qubit 0 is the most significant bit
            let mask = 1usize << bit_pos;
            let bit = (j & mask) != 0;
            match op {
                PauliOp::I => {}
                PauliOp::X => mapped ^= mask,
                PauliOp::Y => {
                    mapped ^= mask;
                    // Y|0> = i|1>, Y|1> = -i|0>
                    phase *= if bit {
                        Complex64::new(0.0, -1.0)
                    } else {
                        Complex64::new(0.0, 1.0)
                    };
                }
                PauliOp::Z => {
                    if bit {
                        phase = -phase;
                    }
                }
            }
        }
        (mapped, phase)
    }
}
