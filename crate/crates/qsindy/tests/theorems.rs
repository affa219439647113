//! End-to-end checks of the bias identity and the active-set preservation
//! property on real pipeline data.

use qsindy::dynamics::{estimate_derivative, integrate, SystemSpec};
use qsindy::feature_maps::{evaluate, FeatureMapSpec};
use qsindy::libraries::{orthogonalize, polynomial_features};
use qsindy::regression::{stlsq_instrumented, verify_theorems};
use qsindy::Error;

fn pipeline_matrices(
    spec: &SystemSpec,
    fmap: &FeatureMapSpec,
) -> (
    nalgebra::DMatrix<f64>,
    nalgebra::DMatrix<f64>,
    nalgebra::DMatrix<f64>,
) {
    let traj = integrate(spec, spec.default_dt(), spec.default_steps()).unwrap();
    let deriv = estimate_derivative(&traj, 5).unwrap();
    let x = traj
        .states
        .rows(deriv.valid_rows.start, deriv.valid_rows.len())
        .into_owned();
    let p = polynomial_features(&x, spec.poly_degree);
    let q = evaluate(fmap, &x, 0.0).unwrap();
    (p.matrix, q.q, deriv.xdot)
}

#[test]
fn bias_identity_on_reference_pairs() {
    for (system, fmap) in [
        (SystemSpec::duffing(), FeatureMapSpec::zz2()),
        (SystemSpec::lotka_volterra(), FeatureMapSpec::zz2()),
    ] {
        let report = verify_theorems(&system, &fmap).unwrap();
        assert!(
            report.max_relative_error < 1e-12,
            "{}: {:e}",
            system.name,
            report.max_relative_error
        );
        assert!(
            report.orth_deviation < 1e-12,
            "{}: {:e}",
            system.name,
            report.orth_deviation
        );
    }
}

#[test]
fn corrupted_projection_is_detected() {
    // negative control for the verifier: a 1e-3 perturbation of the projected
    // block must push the orthogonalized deviation over the bound
    let spec = SystemSpec::duffing();
    let fmap = FeatureMapSpec::zz2();
    let (p, q, xdot) = pipeline_matrices(&spec, &fmap);
    let orth = orthogonalize(&q, &p).unwrap();
    let mut corrupted = orth.q_perp.clone();
    corrupted[(0, 0)] += 1e-3;
    let report = qsindy::regression::bias_report(&p, &q, &corrupted, &xdot).unwrap();
    assert!(
        report.orth_deviation >= 1e-12,
        "corruption went unnoticed: {:e}",
        report.orth_deviation
    );
}

#[test]
fn verification_failure_error_carries_magnitudes() {
    // a map/system pair whose observed bias is on the cancellation floor
    // cannot satisfy the relative bound; the error must surface both numbers
    let system = SystemSpec::cubic_oscillator();
    let fmap = FeatureMapSpec::reupload();
    match verify_theorems(&system, &fmap) {
        Err(Error::VerificationFailure {
            max_relative_error,
            orth_deviation,
        }) => {
            assert!(max_relative_error >= 1e-12);
            assert!(orth_deviation < 1e-12);
        }
        other => panic!("expected verification failure, got {other:?}"),
    }
}

#[test]
fn duffing_overlap_is_high_but_not_total() {
    // the 2-qubit ZZ features of a Duffing trajectory live almost entirely
    // inside the degree-3 polynomial span (0.9949 under the default
    // trajectory protocol), yet keep a nonzero orthogonal remainder
    let spec = SystemSpec::duffing();
    let (p, q, _) = pipeline_matrices(&spec, &FeatureMapSpec::zz2());
    let overlap = qsindy::diagnostics::frac_variance_in_p(&p, &q).unwrap();
    assert!(overlap >= 0.90, "overlap {overlap}");
    assert!(overlap < 1.0, "overlap saturated: {overlap}");
}

#[test]
fn preservation_holds_at_every_stlsq_iterate() {
    // instrumented run: at every iterate, the polynomial coefficients of the
    // orthogonalized fit equal the plain restricted fit on the same support
    for spec in SystemSpec::benchmark_suite() {
        let fmap = if spec.dim == 3 {
            FeatureMapSpec::zz3()
        } else {
            FeatureMapSpec::zz2()
        };
        let (p, q, xdot) = pipeline_matrices(&spec, &fmap);
        let orth = orthogonalize(&q, &p).unwrap();
        let n_poly = p.ncols();
        let mut theta = nalgebra::DMatrix::zeros(p.nrows(), n_poly + orth.q_perp.ncols());
        theta.columns_mut(0, n_poly).copy_from(&p);
        theta
            .columns_mut(n_poly, orth.q_perp.ncols())
            .copy_from(&orth.q_perp);

        let (_, trace) = stlsq_instrumented(&theta, &xdot, spec.stlsq_threshold, 20);
        for it in &trace {
            let support: Vec<usize> = (0..n_poly)
                .filter(|&j| it.active[j] && it.coefficients[j] != 0.0)
                .collect();
            if support.is_empty() {
                continue;
            }
            let mut sub = nalgebra::DMatrix::zeros(p.nrows(), support.len());
            for (k, &j) in support.iter().enumerate() {
                sub.column_mut(k).copy_from(&p.column(j));
            }
            let rhs = nalgebra::DMatrix::from_column_slice(
                xdot.nrows(),
                1,
                xdot.column(it.target).clone_owned().as_slice(),
            );
            let restricted = qsindy::regression::least_squares(&sub, &rhs).unwrap();
            for (k, &j) in support.iter().enumerate() {
                let diff = (restricted[(k, 0)] - it.coefficients[j]).abs();
                assert!(
                    diff < 1e-10,
                    "{} target {} iterate {}: column {} deviates by {:e}",
                    spec.name,
                    it.target,
                    it.iteration,
                    j,
                    diff
                );
            }
        }
    }
}
