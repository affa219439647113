//! Quantum feature maps: data-parameterized circuits whose fixed-observable
//! expectation values form the quantum feature matrix `Q`.
//!
//! Three circuit families are provided:
//!
//! - **ZZ angle encoding** (2- or 3-qubit): `RX(x_i)` data rotations, pairwise
//!   ZZ entanglers with angle `x_i x_j` (compiled as CNOT / RZ / CNOT, in a
//!   ring for 3 qubits), then a second `RY(x_i)` rotation layer.
//! - **IQP**: two layers of `[H per qubit, RZ(x_0), RZ(x_1), RZZ(x_0 x_1)]`.
//! - **Data re-uploading**: three layers of `[RX(x_i) encoding, fixed RZ/RY/RX
//!   rotations per qubit, CNOT]`. The rotation angles are frozen (not trained)
//!   so the map is deterministic; the table below is the canonical set.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::libraries::{Family, FeatureLibrary};
use crate::qsim::{run_noisy, run_pure, Circuit, Gate, PauliOp, PauliString};

/// Frozen rotation angles for the re-uploading map, indexed as
/// `[layer][qubit][rz, ry, rx]`. Generated once from a ChaCha8 stream seeded
/// with 42, uniform in [-pi, pi], and pinned here so every run reproduces the
/// same features. Digits are kept at generator precision; a test asserts the
/// table regenerates bit-exactly from the seed.
#[allow(clippy::excessive_precision)]
pub const REUPLOAD_PARAMS: [[[f64; 3]; 2]; 3] = [
    [
        [
            1.142_887_482_933_189_4e0,
            2.829_163_825_672_049_3e0,
            -4.554_278_725_834_395_3e-1,
        ],
        [
            8.002_297_555_018_627e-1,
            -1.328_303_832_427_953_2e0,
            -2.199_373_283_100_374e0,
        ],
    ],
    [
        [
            -1.206_116_735_508_829_6e0,
            1.909_288_905_969_901e0,
            1.704_306_354_130_887_2e0,
        ],
        [
            -1.642_517_225_919_405e0,
            4.314_581_882_702_839_3e-2,
            2.524_603_786_995_006_9e0,
        ],
    ],
    [
        [
            2.871_354_543_177_946_4e0,
            5.842_015_869_444_190_4e-1,
            1.437_583_288_686_598_2e0,
        ],
        [
            -2.016_045_398_926_481_3e0,
            4.737_091_109_836_000_2e-1,
            -2.062_378_351_075_477e0,
        ],
    ],
];

/// Which circuit family a map uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeatureMapKind {
    Zz2,
    Zz3,
    Iqp,
    Reupload,
}

impl FeatureMapKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "zz2" => Some(Self::Zz2),
            "zz3" => Some(Self::Zz3),
            "iqp" => Some(Self::Iqp),
            "reupload" => Some(Self::Reupload),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Zz2 => "zz2",
            Self::Zz3 => "zz3",
            Self::Iqp => "iqp",
            Self::Reupload => "reupload",
        }
    }
}

/// A fully specified feature map: circuit family, optional input rescaling,
/// and (for the re-uploading map) the frozen rotation table.
#[derive(Clone, Debug)]
pub struct FeatureMapSpec {
    pub kind: FeatureMapKind,
    /// When set, inputs are multiplied by `pi / (2 max|X|)` with the maximum
    /// taken over the matrix being evaluated.
    pub rescale: bool,
    /// Present iff `kind == Reupload`.
    pub reupload_params: Option<[[[f64; 3]; 2]; 3]>,
}

impl FeatureMapSpec {
    pub fn zz2() -> Self {
        Self {
            kind: FeatureMapKind::Zz2,
            rescale: false,
            reupload_params: None,
        }
    }

    /// The 3-qubit map rescales by default: the 3-D systems it serves have
    /// amplitudes far outside one rotation period.
    pub fn zz3() -> Self {
        Self {
            kind: FeatureMapKind::Zz3,
            rescale: true,
            reupload_params: None,
        }
    }

    pub fn iqp() -> Self {
        Self {
            kind: FeatureMapKind::Iqp,
            rescale: false,
            reupload_params: None,
        }
    }

    pub fn reupload() -> Self {
        Self {
            kind: FeatureMapKind::Reupload,
            rescale: false,
            reupload_params: Some(REUPLOAD_PARAMS),
        }
    }

    pub fn of_kind(kind: FeatureMapKind) -> Self {
        match kind {
            FeatureMapKind::Zz2 => Self::zz2(),
            FeatureMapKind::Zz3 => Self::zz3(),
            FeatureMapKind::Iqp => Self::iqp(),
            FeatureMapKind::Reupload => Self::reupload(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self.kind {
            FeatureMapKind::Zz3 => 3,
            _ => 2,
        }
    }

    /// Number of input coordinates the map consumes.
    pub fn input_arity(&self) -> usize {
        match self.kind {
            FeatureMapKind::Zz3 => 3,
            _ => 2,
        }
    }

    /// The fixed observable set: Z and X on each qubit plus the ZZ/XX
    /// correlator for 2 qubits, or Z/X on each qubit plus the three pairwise
    /// ZZ correlators for 3 qubits.
    pub fn observables(&self) -> Vec<PauliString> {
        let n = self.n_qubits();
        let mut obs = Vec::new();
        for q in 0..n {
            obs.push(PauliString::single(n, q, PauliOp::Z));
        }
        for q in 0..n {
            obs.push(PauliString::single(n, q, PauliOp::X));
        }
        if n == 2 {
            obs.push(PauliString::pair(n, 0, 1, PauliOp::Z));
            obs.push(PauliString::pair(n, 0, 1, PauliOp::X));
        } else {
            obs.push(PauliString::pair(n, 0, 1, PauliOp::Z));
            obs.push(PauliString::pair(n, 1, 2, PauliOp::Z));
            obs.push(PauliString::pair(n, 0, 2, PauliOp::Z));
        }
        obs
    }
}

/// Builds the encoding circuit for one (already rescaled) data point.
pub fn build_circuit(spec: &FeatureMapSpec, x: &[f64]) -> Result<Circuit> {
    let arity = spec.input_arity();
    if x.len() != arity {
        return Err(Error::ArityMismatch {
            expected: arity,
            got: x.len(),
        });
    }
    let gates = match spec.kind {
        FeatureMapKind::Zz2 => {
            vec![
                Gate::rx(0, x[0]),
                Gate::rx(1, x[1]),
                Gate::cnot(0, 1),
                Gate::rz(1, x[0] * x[1]),
                Gate::cnot(0, 1),
                Gate::ry(0, x[0]),
                Gate::ry(1, x[1]),
            ]
        }
        FeatureMapKind::Zz3 => {
            let mut g = vec![Gate::rx(0, x[0]), Gate::rx(1, x[1]), Gate::rx(2, x[2])];
            for (a, b) in [(0usize, 1usize), (1, 2), (2, 0)] {
                g.push(Gate::cnot(a, b));
                g.push(Gate::rz(b, x[a] * x[b]));
                g.push(Gate::cnot(a, b));
            }
            g.push(Gate::ry(0, x[0]));
            g.push(Gate::ry(1, x[1]));
            g.push(Gate::ry(2, x[2]));
            g
        }
        FeatureMapKind::Iqp => {
            let mut g = Vec::new();
            for _ in 0..2 {
                g.push(Gate::h(0));
                g.push(Gate::h(1));
                g.push(Gate::rz(0, x[0]));
                g.push(Gate::rz(1, x[1]));
                g.push(Gate::rzz(0, 1, x[0] * x[1]));
            }
            g
        }
        FeatureMapKind::Reupload => {
            let params = spec
                .reupload_params
                .expect("reupload map carries its parameter table");
            let mut g = Vec::new();
            for layer in params.iter() {
                g.push(Gate::rx(0, x[0]));
                g.push(Gate::rx(1, x[1]));
                for (q, angles) in layer.iter().enumerate() {
                    g.push(Gate::rz(q, angles[0]));
                    g.push(Gate::ry(q, angles[1]));
                    g.push(Gate::rx(q, angles[2]));
                }
                g.push(Gate::cnot(0, 1));
            }
            g
        }
    };
    Ok(Circuit::new(spec.n_qubits(), gates))
}

/// Evaluated quantum features for a batch of inputs.
#[derive(Clone, Debug)]
pub struct QuantumFeatures {
    /// Shape (N, q); every entry is a Pauli expectation in [-1, 1].
    pub q: DMatrix<f64>,
    pub column_labels: Vec<String>,
    pub map_kind: FeatureMapKind,
}

impl QuantumFeatures {
    /// Wraps the features as a library block with `q:`-prefixed labels.
    pub fn into_library(self) -> FeatureLibrary {
        let labels = self
            .column_labels
            .iter()
            .map(|l| format!("q:{l}"))
            .collect();
        FeatureLibrary::from_parts(self.q, labels, Family::Quantum)
    }
}

/// Evaluates the map over every row of `X`. With `p_noise = 0` the pure-state
/// simulator is used; otherwise each circuit runs through the density-matrix
/// simulator with per-gate depolarizing noise of strength `p_noise`.
pub fn evaluate(spec: &FeatureMapSpec, x: &DMatrix<f64>, p_noise: f64) -> Result<QuantumFeatures> {
    assert!((0.0..=1.0).contains(&p_noise), "p_noise must lie in [0, 1]");
    if x.ncols() != spec.input_arity() {
        return Err(Error::ArityMismatch {
            expected: spec.input_arity(),
            got: x.ncols(),
        });
    }
    let scale = if spec.rescale {
        let max_abs = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if max_abs > 0.0 {
            std::f64::consts::FRAC_PI_2 / max_abs
        } else {
            1.0
        }
    } else {
        1.0
    };

    let observables = spec.observables();
    let rows: Result<Vec<Vec<f64>>> = (0..x.nrows())
        .into_par_iter()
        .map(|i| {
            let point: Vec<f64> = (0..x.ncols()).map(|j| scale * x[(i, j)]).collect();
            let circuit = build_circuit(spec, &point)?;
            let values = if p_noise == 0.0 {
                let state = run_pure(&circuit);
                observables.iter().map(|o| state.expectation(o)).collect()
            } else {
                let state = run_noisy(&circuit, p_noise);
                observables.iter().map(|o| state.expectation(o)).collect()
            };
            Ok(values)
        })
        .collect();
    let rows = rows?;

    let q = DMatrix::from_fn(x.nrows(), observables.len(), |i, j| rows[i][j]);
    Ok(QuantumFeatures {
        q,
        column_labels: observables.iter().map(|o| o.label()).collect(),
        map_kind: spec.kind,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reupload_table_regenerates_from_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for layer in REUPLOAD_PARAMS.iter() {
            for qubit in layer.iter() {
                for angle in qubit.iter() {
                    let drawn: f64 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                    assert_eq!(*angle, drawn);
                }
            }
        }
    }

    #[test]
    fn zz2_at_origin_reduces_to_identity() {
        let spec = FeatureMapSpec::zz2();
        let circuit = build_circuit(&spec, &[0.0, 0.0]).unwrap();
        let state = run_pure(&circuit);
        let get = |label: &str| {
            let obs = spec.observables();
            let k = spec
                .observables()
                .iter()
                .position(|o| o.label() == label)
                .unwrap();
            state.expectation(&obs[k])
        };
        assert!((get("Z0") - 1.0).abs() < 1e-12);
        assert!((get("Z1") - 1.0).abs() < 1e-12);
        assert!((get("Z0Z1") - 1.0).abs() < 1e-12);
        assert!(get("X0").abs() < 1e-12);
        assert!(get("X1").abs() < 1e-12);
    }

    #[test]
    fn reupload_with_zero_params_fixes_ground_state() {
        let mut spec = FeatureMapSpec::reupload();
        spec.reupload_params = Some([[[0.0; 3]; 2]; 3]);
        let circuit = build_circuit(&spec, &[0.0, 0.0]).unwrap();
        let state = run_pure(&circuit);
        for q in 0..2 {
            let z = state.expectation(&PauliString::single(2, q, PauliOp::Z));
            assert!((z - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let err = build_circuit(&FeatureMapSpec::zz2(), &[1.0, 2.0, 3.0]).unwrap_err();
        assert!(matches!(
            err,
            Error::ArityMismatch {
                expected: 2,
                got: 3
            }
        ));
        let err = evaluate(&FeatureMapSpec::zz3(), &DMatrix::zeros(4, 2), 0.0).unwrap_err();
        assert!(matches!(
            err,
            Error::ArityMismatch {
                expected: 3,
                got: 2
            }
        ));
    }

    #[test]
    fn duplicate_rows_give_identical_features() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for spec in [
            FeatureMapSpec::zz2(),
            FeatureMapSpec::iqp(),
            FeatureMapSpec::reupload(),
        ] {
            let mut x = DMatrix::from_fn(6, 2, |_, _| rng.random_range(-1.5..1.5));
            for j in 0..2 {
                let v = x[(1, j)];
                x[(4, j)] = v;
            }
            let feats = evaluate(&spec, &x, 0.0).unwrap();
            for c in 0..feats.q.ncols() {
                assert_eq!(feats.q[(1, c)], feats.q[(4, c)]);
            }
        }
    }

    #[test]
    fn rescale_hits_half_pi_exactly_on_lorenz() {
        let system = crate::dynamics::SystemSpec::lorenz();
        let traj = crate::dynamics::integrate(&system, 0.002, 2000).unwrap();
        let spec = FeatureMapSpec::zz3();
        assert!(spec.rescale);
        let max_abs = traj.states.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let scale = std::f64::consts::FRAC_PI_2 / max_abs;
        let scaled_max = traj
            .states
            .iter()
            .fold(0.0_f64, |m, v| m.max((v * scale).abs()));
        assert!((scaled_max - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        // and the features are well-defined over the rescaled inputs
        let feats = evaluate(&spec, &traj.states, 0.0).unwrap();
        assert_eq!(feats.q.ncols(), 9);
        assert!(feats.q.iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn features_are_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = DMatrix::from_fn(40, 2, |_, _| rng.random_range(-3.0..3.0));
        for spec in [
            FeatureMapSpec::zz2(),
            FeatureMapSpec::iqp(),
            FeatureMapSpec::reupload(),
        ] {
            let feats = evaluate(&spec, &x, 0.0).unwrap();
            assert!(feats.q.iter().all(|v| (-1.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn duffing_features_are_bounded_and_nondegenerate() {
        // 200 trajectory points: entries stay in [-1, 1] and no column
        // degenerates to a constant
        let spec = crate::dynamics::SystemSpec::duffing();
        let traj = crate::dynamics::integrate(&spec, 0.05, 199).unwrap();
        let feats = evaluate(&FeatureMapSpec::zz2(), &traj.states, 0.0).unwrap();
        assert_eq!(feats.q.nrows(), 200);
        assert!(feats.q.iter().all(|v| v.abs() <= 1.0));
        for c in 0..feats.q.ncols() {
            let col = feats.q.column(c);
            let mean = col.sum() / col.len() as f64;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / col.len() as f64;
            assert!(var > 1e-6, "column {c} is constant");
        }
    }

    #[test]
    fn maps_are_pairwise_distinct_on_duffing() {
        let spec = crate::dynamics::SystemSpec::duffing();
        let traj = crate::dynamics::integrate(&spec, 0.05, 199).unwrap();
        let q: Vec<DMatrix<f64>> = [
            FeatureMapSpec::zz2(),
            FeatureMapSpec::iqp(),
            FeatureMapSpec::reupload(),
        ]
        .iter()
        .map(|s| evaluate(s, &traj.states, 0.0).unwrap().q)
        .collect();
        for a in 0..q.len() {
            for b in (a + 1)..q.len() {
                let dist = (&q[a] - &q[b]).norm();
                assert!(dist > 1e-3, "maps {a} and {b} coincide");
            }
        }
    }

    #[test]
    fn noise_contracts_mean_feature_magnitude() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let x = DMatrix::from_fn(30, 2, |_, _| rng.random_range(-1.2..1.2));
        let spec = FeatureMapSpec::zz2();
        let clean = evaluate(&spec, &x, 0.0).unwrap().q;
        let noisy = evaluate(&spec, &x, 0.05).unwrap().q;
        for c in 0..clean.ncols() {
            let mean_abs = |m: &DMatrix<f64>| {
                m.column(c).iter().map(|v| v.abs()).sum::<f64>() / m.nrows() as f64
            };
            assert!(mean_abs(&noisy) <= mean_abs(&clean) + 1e-12);
        }
    }
}
