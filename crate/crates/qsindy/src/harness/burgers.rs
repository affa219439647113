//! The PDE extension: identify the viscous Burgers right-hand side from a
//! solved field, with plain, naive-augmented, and orthogonalized fits over a
//! degree-2 library in (u, u_x, u_xx) plus the rescaled 3-qubit features.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::config::{ExperimentConfig, Method};
use crate::diagnostics::{frac_variance_in_p, r2_q, tpr};
use crate::dynamics::{burgers_regression_data, gaussian_pulse, solve_burgers};
use crate::error::Result;
use crate::feature_maps::{evaluate, FeatureMapSpec};
use crate::libraries::{orthogonalize, polynomial_features_named, Family, FeatureLibrary};
use crate::regression::stlsq;

pub const NU: f64 = 0.1;
pub const N_X: usize = 256;
pub const N_T: usize = 134;
pub const T_FINAL: f64 = 2.0;
pub const STLSQ_LAMBDA: f64 = 0.05;

/// Active terms of one method's fitted equation.
#[derive(Clone, Debug, Serialize)]
pub struct MethodCoefficients {
    pub method: String,
    pub terms: Vec<(String, f64)>,
    pub tpr: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BurgersReport {
    /// Plain-fit coefficient on `uxx` (truth: 0.1).
    pub vanilla_uxx: f64,
    /// Plain-fit coefficient on `u*ux` (truth: -1).
    pub vanilla_u_ux: f64,
    pub r2_q: f64,
    pub frac_var_in_p: f64,
    pub methods: Vec<MethodCoefficients>,
}

/// Solves the default Burgers setup (Gaussian pulse on a periodic domain)
/// and fits all three methods.
pub fn run_burgers(_cfg: &ExperimentConfig) -> Result<BurgersReport> {
    let length = 2.0 * std::f64::consts::PI;
    let u0: Vec<f64> = (0..N_X)
        .map(|i| gaussian_pulse(i as f64 * length / N_X as f64, length))
        .collect();
    let field = solve_burgers(NU, N_X, N_T, length, T_FINAL, &u0)?;
    let (features, u_t) = burgers_regression_data(&field);

    let names: Vec<String> = ["u", "ux", "uxx"].iter().map(|s| s.to_string()).collect();
    let p = polynomial_features_named(&features, 2, &names);
    let fmap = FeatureMapSpec::zz3();
    let q = evaluate(&fmap, &features, 0.0)?;
    let q_labels: Vec<String> = q.column_labels.iter().map(|l| format!("q:{l}")).collect();

    let mut xi_true = nalgebra::DMatrix::zeros(p.labels.len(), 1);
    let idx = |label: &str| {
        p.labels
            .iter()
            .position(|l| l == label)
            .expect("degree-2 label")
    };
    xi_true[(idx("uxx"), 0)] = NU;
    xi_true[(idx("u*ux"), 0)] = -1.0;

    let diag_r2 = r2_q(&q.q, &u_t)?;
    let diag_frac = frac_variance_in_p(&p.matrix, &q.q)?;

    let mut methods = Vec::new();
    let mut vanilla_uxx = 0.0;
    let mut vanilla_u_ux = 0.0;
    for method in [Method::Vanilla, Method::NaiveQ, Method::OrthQ] {
        let theta = match method {
            Method::Vanilla => p.clone(),
            Method::NaiveQ => {
                let q_lib =
                    FeatureLibrary::from_parts(q.q.clone(), q_labels.clone(), Family::Quantum);
                FeatureLibrary::concat(&[&p, &q_lib])
            }
            Method::OrthQ => {
                let orth = orthogonalize(&q.q, &p.matrix)?;
                let q_lib = orth.into_library(q_labels.clone(), Family::Quantum);
                FeatureLibrary::concat(&[&p, &q_lib])
            }
            Method::Rbf => unreachable!(),
        };
        let model = stlsq(&theta, &u_t, STLSQ_LAMBDA, 20);
        let score = tpr(&model, &xi_true)?;
        if method == Method::Vanilla {
            vanilla_uxx = model.xi[(idx("uxx"), 0)];
            vanilla_u_ux = model.xi[(idx("u*ux"), 0)];
        }
        let terms: Vec<(String, f64)> = model
            .labels
            .iter()
            .enumerate()
            .filter(|(i, _)| model.active[(*i, 0)])
            .map(|(i, label)| (label.clone(), model.xi[(i, 0)]))
            .collect();
        methods.push(MethodCoefficients {
            method: method.name().to_string(),
            terms,
            tpr: score.tpr,
        });
    }

    Ok(BurgersReport {
        vanilla_uxx,
        vanilla_u_ux,
        r2_q: diag_r2,
        frac_var_in_p: diag_frac,
        methods,
    })
}

/// Writes `burgers.csv` (active terms per method) and `burgers_report.json`.
pub fn write_burgers_outputs(dir: &Path, report: &BurgersReport) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut out = std::io::BufWriter::new(std::fs::File::create(dir.join("burgers.csv"))?);
    writeln!(out, "method,term,coefficient")?;
    for m in &report.methods {
        for (label, value) in &m.terms {
            writeln!(out, "{},{},{}", m.method, label, value)?;
        }
    }
    drop(out);
    let file = std::fs::File::create(dir.join("burgers_report.json"))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), report)
        .map_err(|e| crate::error::Error::Config(format!("report serialization: {e}")))?;
    Ok(())
}
