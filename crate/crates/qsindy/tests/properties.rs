//! Property tests over the library's structural invariants.

use nalgebra::DMatrix;
use proptest::prelude::*;

use qsindy::diagnostics::{frac_variance_in_p, pearson, r2_q};
use qsindy::libraries::orthogonalize;
use qsindy::qsim::{run_pure, Circuit, Gate};
use qsindy::regression::{least_squares, stlsq_instrumented};

fn matrix_strategy(rows: usize, cols: usize) -> impl Strategy<Value = DMatrix<f64>> {
    proptest::collection::vec(-1.0f64..1.0, rows * cols)
        .prop_map(move |v| DMatrix::from_row_slice(rows, cols, &v))
}

fn gate_strategy(n_qubits: usize) -> impl Strategy<Value = Gate> {
    (
        0usize..6,
        0usize..n_qubits,
        0usize..n_qubits,
        -std::f64::consts::PI..std::f64::consts::PI,
    )
        .prop_filter_map(
            "distinct qubits for 2q gates",
            move |(kind, q, q2, angle)| {
                let q2 = if q2 == q { (q2 + 1) % n_qubits } else { q2 };
                Some(match kind {
                    0 => Gate::h(q),
                    1 => Gate::rx(q, angle),
                    2 => Gate::ry(q, angle),
                    3 => Gate::rz(q, angle),
                    4 => Gate::rzz(q, q2, angle),
                    _ => Gate::cnot(q, q2),
                })
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pure_state_norm_is_preserved(
        gates in proptest::collection::vec(gate_strategy(3), 0..16)
    ) {
        let circuit = Circuit::new(3, gates);
        let state = run_pure(&circuit);
        prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn projector_is_idempotent(
        p in matrix_strategy(60, 5),
        q in matrix_strategy(60, 3),
    ) {
        let once = match orthogonalize(&q, &p) {
            Ok(o) => o,
            Err(_) => return Ok(()), // degenerate random draw
        };
        let twice = orthogonalize(&once.q_perp, &p).unwrap();
        let diff = (&twice.q_perp - &once.q_perp).abs().max();
        prop_assert!(diff < 1e-12, "second projection moved the block by {diff:e}");
    }

    #[test]
    fn projection_preserves_least_squares_residual(
        p in matrix_strategy(60, 5),
        q in matrix_strategy(60, 3),
        xdot in matrix_strategy(60, 2),
    ) {
        // [P, Q] and [P, Q_perp] span the same column space
        let orth = match orthogonalize(&q, &p) {
            Ok(o) => o,
            Err(_) => return Ok(()),
        };
        let naive = {
            let mut theta = DMatrix::zeros(60, 8);
            theta.columns_mut(0, 5).copy_from(&p);
            theta.columns_mut(5, 3).copy_from(&q);
            theta
        };
        let proj = {
            let mut theta = DMatrix::zeros(60, 8);
            theta.columns_mut(0, 5).copy_from(&p);
            theta.columns_mut(5, 3).copy_from(&orth.q_perp);
            theta
        };
        let (a, b) = match (least_squares(&naive, &xdot), least_squares(&proj, &xdot)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return Ok(()),
        };
        let res_naive = (&xdot - naive * a).norm();
        let res_proj = (&xdot - proj * b).norm();
        prop_assert!((res_naive - res_proj).abs() < 1e-10,
            "residuals differ: {res_naive} vs {res_proj}");
    }

    #[test]
    fn frac_variance_stays_in_unit_interval(
        p in matrix_strategy(40, 4),
        q in matrix_strategy(40, 3),
    ) {
        if let Ok(v) = frac_variance_in_p(&p, &q) {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn r2q_never_exceeds_one_and_dropping_a_column_never_helps(
        q in matrix_strategy(50, 4),
        xdot in matrix_strategy(50, 1),
    ) {
        let full = match r2_q(&q, &xdot) {
            Ok(v) => v,
            Err(_) => return Ok(()),
        };
        prop_assert!(full <= 1.0 + 1e-12);
        // nested-model property: removing a regressor cannot increase R^2
        let reduced_m = q.columns(0, 3).into_owned();
        let reduced = r2_q(&reduced_m, &xdot).unwrap();
        prop_assert!(reduced <= full + 1e-10, "reduced {reduced} > full {full}");
    }

    #[test]
    fn pearson_invariant_under_positive_affine_maps(
        pairs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 5..20),
        scale in 0.1f64..10.0,
        offset in -5.0f64..5.0,
    ) {
        let x: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let y: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let (r0, p0) = match pearson(&x, &y) {
            Ok(v) => v,
            Err(_) => return Ok(()),
        };
        let x2: Vec<f64> = x.iter().map(|v| scale * v + offset).collect();
        let (r1, p1) = pearson(&x2, &y).unwrap();
        prop_assert!((r0 - r1).abs() < 1e-12);
        prop_assert!((p0 - p1).abs() < 1e-9);
    }

    #[test]
    fn stlsq_active_sets_shrink_monotonically(
        theta in matrix_strategy(80, 8),
        xdot in matrix_strategy(80, 1),
        lambda in 0.01f64..0.5,
    ) {
        let (_, trace) = stlsq_instrumented(&theta, &xdot, lambda, 20);
        let mut last = usize::MAX;
        for it in trace.iter().filter(|t| t.target == 0) {
            let size = it.active.iter().filter(|a| **a).count();
            prop_assert!(size <= last);
            last = size;
        }
    }
}
