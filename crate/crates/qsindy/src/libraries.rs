//! Candidate-function libraries: polynomial and RBF blocks, concatenation,
//! and the projection of an auxiliary block onto the orthogonal complement of
//! the polynomial column space.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, COND_LIMIT};

/// Provenance of a library column.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Poly,
    Quantum,
    Rbf,
}

/// A named column block of candidate functions evaluated on the data.
#[derive(Clone, Debug)]
pub struct FeatureLibrary {
    /// Shape (N, m).
    pub matrix: DMatrix<f64>,
    pub labels: Vec<String>,
    /// Per-column provenance tag.
    pub family: Vec<Family>,
}

impl FeatureLibrary {
    /// Builds a single-family block.
    pub fn from_parts(matrix: DMatrix<f64>, labels: Vec<String>, family: Family) -> Self {
        assert_eq!(
            matrix.ncols(),
            labels.len(),
            "label count must match columns"
        );
        let family = vec![family; labels.len()];
        let lib = Self {
            matrix,
            labels,
            family,
        };
        lib.assert_invariants();
        lib
    }

    fn assert_invariants(&self) {
        for (i, a) in self.labels.iter().enumerate() {
            for b in self.labels.iter().skip(i + 1) {
                assert_ne!(a, b, "duplicate label `{a}`");
            }
        }
        // the polynomial block, when present, must be a contiguous leading
        // span: the bias formula's block structure depends on it
        let first_non_poly = self.family.iter().position(|f| *f != Family::Poly);
        if let Some(k) = first_non_poly {
            assert!(
                self.family[k..].iter().all(|f| *f != Family::Poly),
                "polynomial columns must form a contiguous leading span"
            );
        }
    }

    /// Number of leading polynomial columns.
    pub fn n_poly(&self) -> usize {
        self.family
            .iter()
            .take_while(|f| **f == Family::Poly)
            .count()
    }

    /// Concatenates blocks left to right, checking the invariants.
    pub fn concat(parts: &[&FeatureLibrary]) -> Self {
        assert!(!parts.is_empty());
        let n = parts[0].matrix.nrows();
        let m: usize = parts.iter().map(|p| p.matrix.ncols()).sum();
        let mut matrix = DMatrix::zeros(n, m);
        let mut labels = Vec::with_capacity(m);
        let mut family = Vec::with_capacity(m);
        let mut at = 0;
        for part in parts {
            assert_eq!(part.matrix.nrows(), n, "row counts must match");
            matrix
                .columns_mut(at, part.matrix.ncols())
                .copy_from(&part.matrix);
            labels.extend(part.labels.iter().cloned());
            family.extend(part.family.iter().copied());
            at += part.matrix.ncols();
        }
        let lib = Self {
            matrix,
            labels,
            family,
        };
        lib.assert_invariants();
        lib
    }

    /// Writes the library as CSV with the label header (inspection path).
    pub fn to_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.labels.join(","))?;
        for i in 0..self.matrix.nrows() {
            let row: Vec<String> = (0..self.matrix.ncols())
                .map(|j| format!("{}", self.matrix[(i, j)]))
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Exponent vectors of all monomials in `d` variables with total degree <= D,
/// in graded lexicographic order (degree first, then lexicographic with x0
/// heaviest).
fn monomial_exponents(d: usize, degree: usize) -> Vec<Vec<u32>> {
    fn fill(d: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == d - 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=total).rev() {
            prefix.push(e);
            fill(d, total - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for total in 0..=degree as u32 {
        fill(d, total, &mut Vec::new(), &mut out);
    }
    out
}

fn monomial_label(exponents: &[u32], names: &[String]) -> String {
    let mut parts = Vec::new();
    for (v, &e) in exponents.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[v].clone()),
            _ => parts.push(format!("{}^{e}", names[v])),
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// All monomials of total degree <= `degree` (constant included), with
/// variables named `x0..x{d-1}`.
pub fn polynomial_features(x: &DMatrix<f64>, degree: usize) -> FeatureLibrary {
    let names: Vec<String> = (0..x.ncols()).map(|j| format!("x{j}")).collect();
    polynomial_features_named(x, degree, &names)
}

/// As [`polynomial_features`], with caller-chosen variable names (the PDE
/// path uses `u`, `ux`, `uxx`).
pub fn polynomial_features_named(
    x: &DMatrix<f64>,
    degree: usize,
    names: &[String],
) -> FeatureLibrary {
    let d = x.ncols();
    assert!((1..=3).contains(&degree), "degree must be 1..=3");
    assert!(d <= 3, "at most 3 state variables");
    assert_eq!(names.len(), d);

    let exps = monomial_exponents(d, degree);
    let mut matrix = DMatrix::zeros(x.nrows(), exps.len());
    for (col, e) in exps.iter().enumerate() {
        for row in 0..x.nrows() {
            let mut v = 1.0;
            for (var, &p) in e.iter().enumerate() {
                for _ in 0..p {
                    v *= x[(row, var)];
                }
            }
            matrix[(row, col)] = v;
        }
    }
    let labels = exps.iter().map(|e| monomial_label(e, names)).collect();
    FeatureLibrary::from_parts(matrix, labels, Family::Poly)
}

/// Evaluates a monomial label such as `x0^2*x1` (or `1`) at a point, given
/// the variable names in column order. Used to cross-check labels against
/// matrix values.
pub fn eval_poly_label(label: &str, names: &[String], point: &[f64]) -> Result<f64> {
    if label == "1" {
        return Ok(1.0);
    }
    let mut value = 1.0;
    for factor in label.split('*') {
        let (name, power) = match factor.split_once('^') {
            Some((n, p)) => {
                let p: u32 = p
                    .parse()
                    .map_err(|_| Error::MissingLabel(label.to_string()))?;
                (n, p)
            }
            None => (factor, 1),
        };
        let var = names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::MissingLabel(label.to_string()))?;
        value *= point[var].powi(power as i32);
    }
    Ok(value)
}

/// Gaussian RBF block: column j is `exp(-gamma ||x_i - l_j||^2)`.
pub fn rbf_features(x: &DMatrix<f64>, landmarks: &DMatrix<f64>, gamma: f64) -> FeatureLibrary {
    assert!(gamma > 0.0, "gamma must be positive");
    assert_eq!(x.ncols(), landmarks.ncols(), "dimension mismatch");
    assert!(landmarks.nrows() >= 1);
    let mut matrix = DMatrix::zeros(x.nrows(), landmarks.nrows());
    for j in 0..landmarks.nrows() {
        for i in 0..x.nrows() {
            let mut dist2 = 0.0;
            for k in 0..x.ncols() {
                let diff = x[(i, k)] - landmarks[(j, k)];
                dist2 += diff * diff;
            }
            matrix[(i, j)] = (-gamma * dist2).exp();
        }
    }
    let labels = (0..landmarks.nrows()).map(|j| format!("rbf:{j}")).collect();
    FeatureLibrary::from_parts(matrix, labels, Family::Rbf)
}

/// Median heuristic bandwidth: `1 / median ||x_i - x_j||^2` over all pairs of
/// a deterministic stride subsample of at most 500 rows.
pub fn median_bandwidth(x: &DMatrix<f64>) -> Result<f64> {
    let n = x.nrows();
    assert!(n >= 2, "need at least two rows");
    let stride = n.div_ceil(500);
    let rows: Vec<usize> = (0..n).step_by(stride).collect();
    let mut dist2 = Vec::with_capacity(rows.len() * (rows.len() - 1) / 2);
    for (a, &i) in rows.iter().enumerate() {
        for &j in rows.iter().skip(a + 1) {
            let mut d = 0.0;
            for k in 0..x.ncols() {
                let diff = x[(i, k)] - x[(j, k)];
                d += diff * diff;
            }
            dist2.push(d);
        }
    }
    dist2.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = dist2.len() / 2;
    let median = if dist2.len() % 2 == 1 {
        dist2[mid]
    } else {
        0.5 * (dist2[mid - 1] + dist2[mid])
    };
    if median == 0.0 {
        return Err(Error::Degenerate(
            "median pairwise distance is zero (all points identical)".into(),
        ));
    }
    Ok(1.0 / median)
}

/// Deterministic stride sample of `l` trajectory rows: indices
/// `round(k N / l)` for `k = 0..l`. The `seed` parameter is reserved for
/// randomized selection rules and is ignored by the stride rule.
pub fn select_landmarks(x: &DMatrix<f64>, l: usize, _seed: u64) -> DMatrix<f64> {
    let n = x.nrows();
    assert!(l >= 1 && l <= n, "need 1 <= L <= N");
    let mut out = DMatrix::zeros(l, x.ncols());
    for k in 0..l {
        let idx = ((k as f64 * n as f64 / l as f64).round() as usize).min(n - 1);
        out.row_mut(k).copy_from(&x.row(idx));
    }
    out
}

/// An auxiliary block projected onto the orthogonal complement of the
/// polynomial column space.
#[derive(Clone, Debug)]
pub struct OrthogonalizedLibrary {
    /// `Q - P A`, same shape as the input block.
    pub q_perp: DMatrix<f64>,
    /// The projection coefficients `A` solving `min ||P A - Q||_F`.
    pub projection_coeffs: DMatrix<f64>,
}

impl OrthogonalizedLibrary {
    /// Wraps the projected block as a library column block.
    pub fn into_library(self, labels: Vec<String>, family: Family) -> FeatureLibrary {
        FeatureLibrary::from_parts(self.q_perp, labels, family)
    }
}

/// Projects `Q` onto the orthogonal complement of `col(P)`. The solve goes
/// through the factorized least-squares core rather than the explicit normal
/// equations, with one refinement pass so `P^T q_perp` lands at machine zero
/// even for strongly overlapping blocks.
pub fn orthogonalize(q: &DMatrix<f64>, p: &DMatrix<f64>) -> Result<OrthogonalizedLibrary> {
    assert_eq!(q.nrows(), p.nrows(), "row counts must match");
    let first = linalg::lstsq(p, q);
    if first.cond > COND_LIMIT {
        return Err(Error::RankDeficient { cond: first.cond });
    }
    let mut coeffs = first.solution;
    let mut q_perp = q - p * &coeffs;
    // one pass of iterative refinement on the projection
    let correction = linalg::lstsq(p, &q_perp).solution;
    q_perp -= p * &correction;
    coeffs += correction;
    Ok(OrthogonalizedLibrary {
        q_perp,
        projection_coeffs: coeffs,
    })
}
