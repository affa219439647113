//! Dense least-squares core shared by the library builders, the sparse
//! regression, and the bias verification.
//!
//! Everything routes through a single SVD-based solver with internal column
//! equilibration. Coefficients are always returned in the caller's raw column
//! scale; equilibration only improves the factorization, it does not change
//! the minimizer.

use nalgebra::DMatrix;

/// Condition number above which a design matrix is treated as rank deficient.
pub const COND_LIMIT: f64 = 1e12;

/// Result of a least-squares solve.
pub(crate) struct Lstsq {
    /// Minimizer of ||b - a x||_F, shape (a.ncols, b.ncols).
    pub solution: DMatrix<f64>,
    /// Condition number of the column-equilibrated matrix (inf when singular).
    pub cond: f64,
}

/// Minimum-norm least squares via thin SVD of the column-equilibrated matrix.
///
/// Singular values below `eps * max(n, m) * s_max` are truncated, so a rank
/// deficient system yields the minimum-norm solution instead of noise.
pub(crate) fn lstsq(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Lstsq {
    assert_eq!(
        a.nrows(),
        b.nrows(),
        "lstsq: row mismatch {} vs {}",
        a.nrows(),
        b.nrows()
    );
    let (n, m) = (a.nrows(), a.ncols());
    assert!(m > 0 && n > 0, "lstsq: empty matrix");

    let mut scales = vec![1.0_f64; m];
    let mut a_eq = a.clone();
    for (j, scale) in scales.iter_mut().enumerate() {
        let norm = a.column(j).norm();
        if norm > 0.0 {
            *scale = norm;
            a_eq.column_mut(j).unscale_mut(norm);
        }
    }

    let svd = a_eq.clone().svd(true, true);
    let u = svd.u.as_ref().expect("svd: U requested");
    let v_t = svd.v_t.as_ref().expect("svd: V^T requested");
    let s = &svd.singular_values;

    let s_max = s.iter().cloned().fold(0.0_f64, f64::max);
    let s_min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let cond = if s_min > 0.0 {
        s_max / s_min
    } else {
        f64::INFINITY
    };
    let cutoff = s_max * f64::EPSILON * (n.max(m) as f64);

    // pseudo-inverse application: V * diag(1/s) * U^T, tiny values dropped
    let pinv_apply = |rhs: &DMatrix<f64>| -> DMatrix<f64> {
        let mut ut_rhs = u.transpose() * rhs;
        for (i, sv) in s.iter().enumerate() {
            let inv = if *sv > cutoff { 1.0 / *sv } else { 0.0 };
            ut_rhs.row_mut(i).scale_mut(inv);
        }
        v_t.transpose() * ut_rhs
    };

    // one step of iterative refinement: drives the normal-equation residual
    // to the round-off floor, which the bias-identity checks depend on
    let mut solution = pinv_apply(b);
    let residual = b - &a_eq * &solution;
    solution += pinv_apply(&residual);

    for (j, scale) in scales.iter().enumerate() {
        solution.row_mut(j).unscale_mut(*scale);
    }

    Lstsq { solution, cond }
}

/// Horizontal concatenation.
pub(crate) fn hstack(left: &DMatrix<f64>, right: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(left.nrows(), right.nrows());
    let mut out = DMatrix::zeros(left.nrows(), left.ncols() + right.ncols());
    out.columns_mut(0, left.ncols()).copy_from(left);
    out.columns_mut(left.ncols(), right.ncols())
        .copy_from(right);
    out
}

/// Copies the listed columns into a new matrix.
pub(crate) fn select_columns(a: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows(), cols.len());
    for (k, &j) in cols.iter().enumerate() {
        out.column_mut(k).copy_from(&a.column(j));
    }
    out
}

pub(crate) fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_solution_on_consistent_system() {
        let a = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 2.0, -1.0]);
        let x_true = DMatrix::from_row_slice(2, 1, &[3.0, -2.0]);
        let b = &a * &x_true;
        let fit = lstsq(&a, &b);
        assert!((fit.solution - x_true).abs().max() < 1e-12);
    }

    #[test]
    fn rank_deficient_does_not_blow_up() {
        // second column is a copy of the first
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 2.0, 2.0, 3.0, 3.0]);
        let b = DMatrix::from_row_slice(3, 1, &[1.0, 2.0, 3.0]);
        let fit = lstsq(&a, &b);
        assert!(fit.cond > COND_LIMIT);
        assert!(fit.solution.iter().all(|v| v.is_finite()));
        // minimum-norm solution splits the weight evenly
        assert!((fit.solution[(0, 0)] - 0.5).abs() < 1e-10);
        assert!((fit.solution[(1, 0)] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn badly_scaled_columns_are_equilibrated() {
        let mut a = DMatrix::zeros(50, 3);
        for i in 0..50 {
            let t = i as f64 * 0.1;
            a[(i, 0)] = 1.0;
            a[(i, 1)] = 1e-4 * t;
            a[(i, 2)] = 1e4 * t * t;
        }
        let x_true = DMatrix::from_row_slice(3, 1, &[1.0, 2.0, 3.0]);
        let b = &a * &x_true;
        let fit = lstsq(&a, &b);
        assert!(
            fit.cond < 1e4,
            "equilibrated cond should be modest: {}",
            fit.cond
        );
        assert!((fit.solution - x_true).abs().max() < 1e-3);
    }
}
