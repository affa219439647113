//! The verification command: machine-precision checks of the bias identity
//! and the orthogonalized-fit equality on the reference pairs, plus the
//! STLSQ active-set preservation check on all six systems.

use std::io::Write;
use std::path::Path;

use super::config::ExperimentConfig;
use super::pipeline::{feature_map_for, prepare_cell};
use crate::dynamics::{integrate, SystemSpec};
use crate::error::{Error, Result};
use crate::feature_maps::{evaluate, FeatureMapKind, FeatureMapSpec};
use crate::libraries::{orthogonalize, polynomial_features};
use crate::linalg::hstack;
use crate::regression::{bias_report, verify_stlsq_preservation, BiasReport};

/// Identity checks run on these noise-free pairs.
pub const VERIFY_PAIRS: [(&str, FeatureMapKind); 2] = [
    ("duffing", FeatureMapKind::Zz2),
    ("lotka_volterra", FeatureMapKind::Zz2),
];

pub const BIAS_TOLERANCE: f64 = 1e-12;
pub const PRESERVATION_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct PreservationRow {
    pub system: String,
    pub max_deviation: f64,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct VerifyOutcome {
    /// (system, feature map, report, passed) per verified pair.
    pub reports: Vec<(String, String, BiasReport, bool)>,
    pub preservation: Vec<PreservationRow>,
    pub passed: bool,
}

/// Runs the full verification battery. `perturb` injects an error of the
/// given magnitude into one entry of the projected block after the
/// projection, as a negative control: the run must then fail.
pub fn run_verify(cfg: &ExperimentConfig, perturb: Option<f64>) -> Result<VerifyOutcome> {
    let mut reports = Vec::new();
    let mut all_passed = true;

    for (system, kind) in VERIFY_PAIRS {
        let spec = SystemSpec::by_name(system).expect("known system");
        let fmap = FeatureMapSpec::of_kind(kind);
        let base = integrate(&spec, spec.default_dt(), spec.default_steps())?;
        let data = prepare_cell(&base, 0.0, 0, cfg.smooth_window)?;
        let p = polynomial_features(&data.x, spec.poly_degree);
        let q = evaluate(&fmap, &data.x, 0.0)?;
        let orth = orthogonalize(&q.q, &p.matrix)?;
        let mut q_perp = orth.q_perp;
        if let Some(eps) = perturb {
            q_perp[(0, 0)] += eps;
        }
        let report = bias_report(&p.matrix, &q.q, &q_perp, &data.xdot)?;
        let passed =
            report.max_relative_error < BIAS_TOLERANCE && report.orth_deviation < BIAS_TOLERANCE;
        all_passed &= passed;
        reports.push((system.to_string(), kind.name().to_string(), report, passed));
    }

    let mut preservation = Vec::new();
    for spec in SystemSpec::benchmark_suite() {
        let base = integrate(&spec, spec.default_dt(), spec.default_steps())?;
        let data = prepare_cell(&base, 0.0, 0, cfg.smooth_window)?;
        let p = polynomial_features(&data.x, spec.poly_degree);
        let fmap = feature_map_for(&spec, FeatureMapKind::Zz2);
        let q = evaluate(&fmap, &data.x, 0.0)?;
        let orth = orthogonalize(&q.q, &p.matrix)?;
        let theta = hstack(&p.matrix, &orth.q_perp);
        let deviation =
            verify_stlsq_preservation(&theta, p.matrix.ncols(), &data.xdot, spec.stlsq_threshold);
        let passed = deviation < PRESERVATION_TOLERANCE;
        all_passed &= passed;
        preservation.push(PreservationRow {
            system: spec.name.clone(),
            max_deviation: deviation,
            passed,
        });
    }

    Ok(VerifyOutcome {
        reports,
        preservation,
        passed: all_passed,
    })
}

/// Writes `bias_reports.json` and `preservation.csv`; returns an error when
/// any bound was violated so the caller can map it to the exit code.
pub fn write_verify_outputs(dir: &Path, outcome: &VerifyOutcome) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let json: Vec<serde_json::Value> = outcome
        .reports
        .iter()
        .map(|(system, fmap, report, passed)| {
            serde_json::json!({
                "system": system,
                "feature_map": fmap,
                "max_relative_error": report.max_relative_error,
                "orth_deviation": report.orth_deviation,
                "predicted_bias": report.predicted_bias,
                "observed_bias": report.observed_bias,
                "passed": passed,
            })
        })
        .collect();
    let file = std::fs::File::create(dir.join("bias_reports.json"))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), &json)
        .map_err(|e| Error::Config(format!("report serialization: {e}")))?;

    let mut out = std::io::BufWriter::new(std::fs::File::create(dir.join("preservation.csv"))?);
    writeln!(out, "system,max_deviation,passed")?;
    for row in &outcome.preservation {
        writeln!(out, "{},{},{}", row.system, row.max_deviation, row.passed)?;
    }
    Ok(())
}
