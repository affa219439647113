//! Least squares, sequentially thresholded least squares (STLSQ), the exact
//! coefficient-bias prediction for augmented fits, and its machine-precision
//! verification.
//!
//! When a polynomial block `P` is augmented with an overlapping block `Q`,
//! the joint least-squares polynomial coefficients are biased away from the
//! `P`-only fit by exactly `(P^T P)^{-1} P^T Q xi_Q`. Projecting `Q` onto the
//! orthogonal complement of `col(P)` before fitting zeroes the off-diagonal
//! blocks of the normal equations, so the polynomial coefficients decouple
//! and match the plain fit, at every STLSQ iterate and on every active set.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::dynamics::{estimate_derivative, integrate, SystemSpec};
use crate::error::{Error, Result};
use crate::feature_maps::{evaluate, FeatureMapSpec};
use crate::libraries::{orthogonalize, polynomial_features, FeatureLibrary};
use crate::linalg::{self, hstack, select_columns, COND_LIMIT};

/// Smoothing window used by the verification pipeline.
const VERIFY_SMOOTH_WINDOW: usize = 5;

/// Sparse regression result for one library.
#[derive(Clone, Debug)]
pub struct SindyModel {
    /// Shape (m, d); exactly zero wherever `active` is false.
    pub xi: DMatrix<f64>,
    pub active: DMatrix<bool>,
    pub labels: Vec<String>,
    pub threshold: f64,
    /// Largest per-target iteration count performed.
    pub iterations: usize,
}

impl SindyModel {
    /// JSON form: `{labels, xi (dense, row-major), active, threshold, iterations}`.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<f64>> = (0..self.xi.nrows())
            .map(|i| (0..self.xi.ncols()).map(|j| self.xi[(i, j)]).collect())
            .collect();
        let active: Vec<Vec<bool>> = (0..self.active.nrows())
            .map(|i| {
                (0..self.active.ncols())
                    .map(|j| self.active[(i, j)])
                    .collect()
            })
            .collect();
        serde_json::json!({
            "labels": self.labels,
            "xi": rows,
            "active": active,
            "threshold": self.threshold,
            "iterations": self.iterations,
        })
    }
}

/// Minimizer of `||Xdot - Theta Xi||_F` through the equilibrated SVD solve.
/// Errors when `Theta` is numerically rank deficient.
pub fn least_squares(theta: &DMatrix<f64>, xdot: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let fit = linalg::lstsq(theta, xdot);
    if fit.cond > COND_LIMIT {
        return Err(Error::RankDeficient { cond: fit.cond });
    }
    Ok(fit.solution)
}

/// One STLSQ iterate of one target dimension, recorded for instrumentation.
#[derive(Clone, Debug)]
pub struct StlsqIterate {
    pub target: usize,
    pub iteration: usize,
    /// Active mask over all columns at this iterate (after refit, before the
    /// threshold is applied).
    pub active: Vec<bool>,
    /// Dense coefficients at this iterate (zero on inactive columns).
    pub coefficients: Vec<f64>,
}

/// Coefficients and masks without labels, for callers working on raw
/// matrices.
#[derive(Clone, Debug)]
pub struct StlsqFit {
    pub xi: DMatrix<f64>,
    pub active: DMatrix<bool>,
    pub iterations: usize,
}

fn stlsq_core(
    theta: &DMatrix<f64>,
    xdot: &DMatrix<f64>,
    lambda: f64,
    max_iter: usize,
    mut trace: Option<&mut Vec<StlsqIterate>>,
) -> StlsqFit {
    assert!(lambda > 0.0, "lambda must be positive");
    assert!(max_iter >= 1);
    assert_eq!(theta.nrows(), xdot.nrows());
    let m = theta.ncols();
    let d = xdot.ncols();
    let mut xi = DMatrix::zeros(m, d);
    let mut active = DMatrix::from_element(m, d, false);
    let mut max_iterations = 0usize;

    for target in 0..d {
        let rhs = xdot.column(target).clone_owned();
        let rhs = DMatrix::from_column_slice(rhs.len(), 1, rhs.as_slice());
        let mut mask: Vec<bool> = vec![true; m];
        let mut coeffs = vec![0.0_f64; m];
        let mut iterations = 0usize;

        loop {
            iterations += 1;
            let cols: Vec<usize> = (0..m).filter(|&j| mask[j]).collect();
            coeffs.fill(0.0);
            if !cols.is_empty() {
                let sub = select_columns(theta, &cols);
                let fit = linalg::lstsq(&sub, &rhs).solution;
                for (k, &j) in cols.iter().enumerate() {
                    coeffs[j] = fit[(k, 0)];
                }
            }
            if let Some(t) = trace.as_deref_mut() {
                t.push(StlsqIterate {
                    target,
                    iteration: iterations,
                    active: mask.clone(),
                    coefficients: coeffs.clone(),
                });
            }
            // threshold: deactivate small coefficients, keep going until the
            // active set is stable
            let mut changed = false;
            for j in 0..m {
                if mask[j] && coeffs[j].abs() < lambda {
                    mask[j] = false;
                    coeffs[j] = 0.0;
                    changed = true;
                }
            }
            if !changed || iterations >= max_iter {
                break;
            }
        }

        for j in 0..m {
            xi[(j, target)] = coeffs[j];
            active[(j, target)] = mask[j] && coeffs[j] != 0.0;
        }
        max_iterations = max_iterations.max(iterations);
    }

    StlsqFit {
        xi,
        active,
        iterations: max_iterations,
    }
}

/// STLSQ on a raw design matrix. Per target column: iterate full least
/// squares on the active set, deactivate coefficients below `lambda`, refit,
/// until the active set is stable or `max_iter` is reached. An empty active
/// set is a legal outcome (the column comes back all zero).
pub fn stlsq_matrix(
    theta: &DMatrix<f64>,
    xdot: &DMatrix<f64>,
    lambda: f64,
    max_iter: usize,
) -> StlsqFit {
    stlsq_core(theta, xdot, lambda, max_iter, None)
}

/// As [`stlsq_matrix`], recording every per-target iterate.
pub fn stlsq_instrumented(
    theta: &DMatrix<f64>,
    xdot: &DMatrix<f64>,
    lambda: f64,
    max_iter: usize,
) -> (StlsqFit, Vec<StlsqIterate>) {
    let mut trace = Vec::new();
    let fit = stlsq_core(theta, xdot, lambda, max_iter, Some(&mut trace));
    (fit, trace)
}

/// STLSQ on a labeled library.
pub fn stlsq(
    library: &FeatureLibrary,
    xdot: &DMatrix<f64>,
    lambda: f64,
    max_iter: usize,
) -> SindyModel {
    let fit = stlsq_matrix(&library.matrix, xdot, lambda, max_iter);
    SindyModel {
        xi: fit.xi,
        active: fit.active,
        labels: library.labels.clone(),
        threshold: lambda,
        iterations: fit.iterations,
    }
}

/// Exact bias prediction for the polynomial block of the augmented fit:
/// `(P^T P)^{-1} P^T Q xi_Q`, evaluated through the factorized solve.
pub fn predict_bias(
    p: &DMatrix<f64>,
    q: &DMatrix<f64>,
    xi_q_hat: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let fit = linalg::lstsq(p, q);
    if fit.cond > COND_LIMIT {
        return Err(Error::RankDeficient { cond: fit.cond });
    }
    Ok(fit.solution * xi_q_hat)
}

/// Bias verification artifacts for one (system, feature map) pair.
#[derive(Clone, Debug, Serialize)]
pub struct BiasReport {
    /// Predicted polynomial-coefficient bias, shape (p, d), row-major.
    pub predicted_bias: Vec<Vec<f64>>,
    /// Observed bias: plain fit minus augmented fit, same shape.
    pub observed_bias: Vec<Vec<f64>>,
    /// `max |predicted - observed| / max |observed|`.
    pub max_relative_error: f64,
    /// `max |xi_P from [P, Q_perp] - xi_P from P alone|`.
    pub orth_deviation: f64,
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Computes the bias identity and the orthogonalized deviation from three
/// independent full least-squares fits (plain, augmented, orthogonalized).
/// No intermediate is reused across fits, so agreement is a genuine
/// cross-check of the algebra rather than an arithmetic tautology.
pub fn bias_report(
    p: &DMatrix<f64>,
    q: &DMatrix<f64>,
    q_perp: &DMatrix<f64>,
    xdot: &DMatrix<f64>,
) -> Result<BiasReport> {
    let n_poly = p.ncols();
    let xi_vanilla = least_squares(p, xdot)?;

    let theta_naive = hstack(p, q);
    let xi_naive = least_squares(&theta_naive, xdot)?;
    let xi_p_naive = xi_naive.rows(0, n_poly).into_owned();
    let xi_q_naive = xi_naive.rows(n_poly, q.ncols()).into_owned();

    let predicted = predict_bias(p, q, &xi_q_naive)?;
    let observed = &xi_vanilla - &xi_p_naive;

    let obs_scale = linalg::max_abs(&observed);
    let max_relative_error = if obs_scale > 0.0 {
        linalg::max_abs(&(&predicted - &observed)) / obs_scale
    } else {
        linalg::max_abs(&predicted)
    };

    let theta_orth = hstack(p, q_perp);
    let xi_orth = least_squares(&theta_orth, xdot)?;
    let xi_p_orth = xi_orth.rows(0, n_poly).into_owned();
    let orth_deviation = linalg::max_abs(&(&xi_p_orth - &xi_vanilla));

    Ok(BiasReport {
        predicted_bias: to_rows(&predicted),
        observed_bias: to_rows(&observed),
        max_relative_error,
        orth_deviation,
    })
}

/// Runs the noise-free pipeline for one (system, feature map) pair and checks
/// both identities at the 1e-12 level: predicted vs observed bias (relative),
/// and the orthogonalized fit's deviation from the plain fit (absolute).
pub fn verify_theorems(system: &SystemSpec, fmap: &FeatureMapSpec) -> Result<BiasReport> {
    let traj = integrate(system, system.default_dt(), system.default_steps())?;
    let deriv = estimate_derivative(&traj, VERIFY_SMOOTH_WINDOW)?;
    let x_valid = traj
        .states
        .rows(deriv.valid_rows.start, deriv.valid_rows.len())
        .into_owned();
    let p = polynomial_features(&x_valid, system.poly_degree);
    let q = evaluate(fmap, &x_valid, 0.0)?;
    let orth = orthogonalize(&q.q, &p.matrix)?;
    let report = bias_report(&p.matrix, &q.q, &orth.q_perp, &deriv.xdot)?;
    if report.max_relative_error >= 1e-12 || report.orth_deviation >= 1e-12 {
        return Err(Error::VerificationFailure {
            max_relative_error: report.max_relative_error,
            orth_deviation: report.orth_deviation,
        });
    }
    Ok(report)
}

/// Runs STLSQ on `[P, Q_perp]`, then refits plain STLSQ-style least squares
/// restricted to the final polynomial active set of each target, and returns
/// the largest coefficient difference. With an orthogonalized block this must
/// vanish to round-off regardless of what the auxiliary coefficients do.
pub fn verify_stlsq_preservation(
    theta_orth: &DMatrix<f64>,
    n_poly: usize,
    xdot: &DMatrix<f64>,
    lambda: f64,
) -> f64 {
    let fit = stlsq_matrix(theta_orth, xdot, lambda, 20);
    let p = theta_orth.columns(0, n_poly).into_owned();
    let mut worst = 0.0_f64;
    for target in 0..xdot.ncols() {
        let support: Vec<usize> = (0..n_poly).filter(|&j| fit.active[(j, target)]).collect();
        if support.is_empty() {
            continue;
        }
        let sub = select_columns(&p, &support);
        let rhs = DMatrix::from_column_slice(
            xdot.nrows(),
            1,
            xdot.column(target).clone_owned().as_slice(),
        );
        let restricted = linalg::lstsq(&sub, &rhs).solution;
        for (k, &j) in support.iter().enumerate() {
            worst = worst.max((restricted[(k, 0)] - fit.xi[(j, target)]).abs());
        }
    }
    worst
}
