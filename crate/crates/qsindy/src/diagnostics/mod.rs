//! Recovery scoring and the cannibalization diagnostics: column-space
//! overlap, the dynamics-aware R^2 of the auxiliary block, severity, Pearson
//! correlation with significance, and exhaustive leave-k-out validation of
//! the diagnostic-to-severity relationship.

pub mod stats;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::regression::SindyModel;

/// Per-term recovery detail.
#[derive(Clone, Debug, Serialize)]
pub struct TermRecovery {
    pub label: String,
    pub target: usize,
    pub recovered: bool,
    pub recovered_value: f64,
    pub true_value: f64,
}

/// True-positive rate over the ground-truth terms.
#[derive(Clone, Debug, Serialize)]
pub struct RecoveryScore {
    pub tpr: f64,
    pub per_term: Vec<TermRecovery>,
}

/// Scores a fitted model against the ground-truth coefficients. `xi_true` is
/// aligned with the leading rows of the model (the polynomial block leads by
/// library invariant). A true term counts as recovered when it is active,
/// the sign matches, and the coefficient sits within 50% of the true value
/// (boundary inclusive). Spurious extra terms do not reduce the score.
pub fn tpr(model: &SindyModel, xi_true: &DMatrix<f64>) -> Result<RecoveryScore> {
    if xi_true.nrows() > model.xi.nrows() || xi_true.ncols() != model.xi.ncols() {
        return Err(Error::LabelMisalignment(format!(
            "truth is {}x{}, model is {}x{}",
            xi_true.nrows(),
            xi_true.ncols(),
            model.xi.nrows(),
            model.xi.ncols()
        )));
    }
    let mut per_term = Vec::new();
    let mut hits = 0usize;
    for i in 0..xi_true.nrows() {
        for j in 0..xi_true.ncols() {
            let truth = xi_true[(i, j)];
            if truth == 0.0 {
                continue;
            }
            let value = model.xi[(i, j)];
            let recovered = model.active[(i, j)]
                && value.signum() == truth.signum()
                && (value - truth).abs() <= 0.5 * truth.abs();
            if recovered {
                hits += 1;
            }
            per_term.push(TermRecovery {
                label: model.labels[i].clone(),
                target: j,
                recovered,
                recovered_value: value,
                true_value: truth,
            });
        }
    }
    if per_term.is_empty() {
        return Err(Error::Degenerate(
            "truth matrix has no nonzero terms".into(),
        ));
    }
    Ok(RecoveryScore {
        tpr: hits as f64 / per_term.len() as f64,
        per_term,
    })
}

/// Fraction of the auxiliary block's Frobenius energy lying inside the
/// polynomial column space: `||P (P^T P)^{-1} P^T Q||_F^2 / ||Q||_F^2`.
pub fn frac_variance_in_p(p: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<f64> {
    let q_norm = q.norm();
    if q_norm == 0.0 {
        return Err(Error::Degenerate("auxiliary block is zero".into()));
    }
    let fit = linalg::lstsq(p, q);
    if fit.cond > linalg::COND_LIMIT {
        return Err(Error::RankDeficient { cond: fit.cond });
    }
    let projected = p * fit.solution;
    let value = projected.norm_squared() / q_norm.powi(2);
    Ok(value.clamp(0.0, 1.0))
}

/// R^2 of regressing the derivative on the auxiliary block alone:
/// `1 - ||Xdot - Q Q^+ Xdot||_F^2 / ||Xdot - mean||_F^2`. High values mean
/// the block can explain the dynamics by itself, the precondition for its
/// coefficients to be large.
pub fn r2_q(q: &DMatrix<f64>, xdot: &DMatrix<f64>) -> Result<f64> {
    let n = xdot.nrows() as f64;
    let mut centered = xdot.clone();
    for j in 0..xdot.ncols() {
        let mean = xdot.column(j).sum() / n;
        centered.column_mut(j).add_scalar_mut(-mean);
    }
    let total = centered.norm_squared();
    if total < 1e-300 {
        return Err(Error::Degenerate("derivative target is constant".into()));
    }
    let fit = linalg::lstsq(q, xdot);
    let residual = xdot - q * fit.solution;
    Ok(1.0 - residual.norm_squared() / total)
}

/// Cannibalization severity: TPR lost going from the plain fit to the
/// naively augmented fit at the reference noise level.
pub fn severity(tpr_vanilla: f64, tpr_naive: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&tpr_vanilla));
    debug_assert!((0.0..=1.0).contains(&tpr_naive));
    tpr_vanilla - tpr_naive
}

/// Sample Pearson correlation with a two-sided p-value from the t statistic
/// `t = r sqrt((n-2)/(1-r^2))` on n-2 degrees of freedom.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::Degenerate(
            "pearson needs n >= 3 paired samples".into(),
        ));
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mean_x;
        let dy = b - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("pearson needs nonzero variance".into()));
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let df = n - 2.0;
    let p = if (1.0 - r * r) < 1e-300 {
        0.0
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        stats::student_t_two_sided_p(t, df)
    };
    Ok((r, p))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn recurse(
        start: usize,
        n: usize,
        k: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            recurse(i + 1, n, k, current, out);
            current.pop();
        }
    }
    recurse(0, n, k, &mut current, &mut out);
    out
}

/// Exhaustive leave-k-out cross-validation of a univariate linear predictor
/// (slope + intercept) of `severity` from `diagnostic`. For each of the
/// C(n, k) holdout sets, the line is fit on the retained points and the mean
/// absolute error is taken over all held-out predictions of all splits. A
/// constant diagnostic degrades to predicting the training mean.
pub fn leave_k_out_mae(diagnostic: &[f64], severity: &[f64], k: usize) -> Result<f64> {
    let n = diagnostic.len();
    if severity.len() != n {
        return Err(Error::Degenerate("length mismatch".into()));
    }
    if k == 0 || k >= n.saturating_sub(1) {
        return Err(Error::Degenerate(format!(
            "k = {k} leaves too little training data"
        )));
    }
    let mut total_abs_err = 0.0;
    let mut count = 0usize;
    for holdout in combinations(n, k) {
        let train: Vec<usize> = (0..n).filter(|i| !holdout.contains(i)).collect();
        let m = train.len() as f64;
        let mean_x = train.iter().map(|&i| diagnostic[i]).sum::<f64>() / m;
        let mean_y = train.iter().map(|&i| severity[i]).sum::<f64>() / m;
        let mut sxx = 0.0;
        let mut sxy = 0.0;
        for &i in &train {
            let dx = diagnostic[i] - mean_x;
            sxx += dx * dx;
            sxy += dx * (severity[i] - mean_y);
        }
        let slope = if sxx > 1e-300 { sxy / sxx } else { 0.0 };
        let intercept = mean_y - slope * mean_x;
        for &i in &holdout {
            let predicted = slope * diagnostic[i] + intercept;
            total_abs_err += (predicted - severity[i]).abs();
            count += 1;
        }
    }
    Ok(total_abs_err / count as f64)
}

/// Number of leave-k-out splits, C(n, k).
pub fn split_count(n: usize, k: usize) -> usize {
    let mut num = 1usize;
    let mut den = 1usize;
    for i in 0..k {
        num *= n - i;
        den *= i + 1;
    }
    num / den
}

/// One row of the diagnostic study.
#[derive(Clone, Debug, Serialize)]
pub struct DiagnosticRecord {
    pub system: String,
    pub fmap: String,
    pub frac_var_in_p: f64,
    pub r2_q: f64,
    pub severity: f64,
}
