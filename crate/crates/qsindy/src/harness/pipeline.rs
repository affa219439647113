//! The per-cell pipeline: noisy observation, derivative estimation, library
//! construction per method, sparse fit, and scoring.

use std::time::Instant;

use nalgebra::DMatrix;

use super::config::{ExperimentConfig, Method};
use super::records::ExperimentRecord;
use super::seed::cell_seed;
use crate::diagnostics::{frac_variance_in_p, r2_q, tpr};
use crate::dynamics::{add_noise, assemble_true_xi, estimate_derivative, SystemSpec, Trajectory};
use crate::error::{Error, Result};
use crate::feature_maps::{evaluate, FeatureMapKind, FeatureMapSpec, QuantumFeatures};
use crate::libraries::{
    median_bandwidth, orthogonalize, polynomial_features, rbf_features, select_landmarks, Family,
    FeatureLibrary,
};
use crate::regression::stlsq;

/// Observed data for one cell, aligned on the derivative's valid rows.
#[derive(Clone, Debug)]
pub struct CellData {
    /// Noisy states restricted to the valid rows, shape (N', d).
    pub x: DMatrix<f64>,
    /// Derivative estimate on the same rows.
    pub xdot: DMatrix<f64>,
}

/// Adds observation noise, estimates the derivative, and aligns the rows.
pub fn prepare_cell(
    base: &Trajectory,
    sigma: f64,
    seed: u64,
    smooth_window: usize,
) -> Result<CellData> {
    let noisy = add_noise(base, sigma, seed);
    let deriv = estimate_derivative(&noisy, smooth_window)?;
    let x = noisy
        .states
        .rows(deriv.valid_rows.start, deriv.valid_rows.len())
        .into_owned();
    Ok(CellData {
        x,
        xdot: deriv.xdot,
    })
}

/// The feature map a system encodes through: planar systems use the
/// configured 2-qubit map, the 3-D systems always go through the rescaled
/// 3-qubit map (their coordinates are the three inputs).
pub fn feature_map_for(spec: &SystemSpec, configured: FeatureMapKind) -> FeatureMapSpec {
    if spec.dim == 3 {
        FeatureMapSpec::zz3()
    } else {
        FeatureMapSpec::of_kind(configured)
    }
}

fn quantum_block(
    fmap: &FeatureMapSpec,
    data: &CellData,
    p_noise: f64,
) -> Result<(QuantumFeatures, FeatureLibrary)> {
    let feats = evaluate(fmap, &data.x, p_noise)?;
    let lib = feats.clone().into_library();
    Ok((feats, lib))
}

fn rbf_block(data: &CellData, cfg: &ExperimentConfig, seed: u64) -> Result<FeatureLibrary> {
    let gamma = cfg.rbf_gamma_mult * median_bandwidth(&data.x)?;
    let landmarks = select_landmarks(&data.x, cfg.rbf_landmarks.min(data.x.nrows()), seed);
    Ok(rbf_features(&data.x, &landmarks, gamma))
}

/// Fits one method on prepared cell data and scores recovery. Returns
/// `(tpr, r2_q, frac_var_in_p)`; the diagnostics are reported for the raw
/// auxiliary block whenever the method carries one.
pub fn fit_method(
    spec: &SystemSpec,
    data: &CellData,
    method: Method,
    fmap: &FeatureMapSpec,
    p_noise: f64,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<(f64, Option<f64>, Option<f64>)> {
    let p_lib = polynomial_features(&data.x, spec.poly_degree);
    let xi_true = assemble_true_xi(spec, &p_lib.labels)?;

    let theta;
    let mut diag_r2 = None;
    let mut diag_frac = None;
    match method {
        Method::Vanilla => {
            theta = p_lib;
        }
        Method::NaiveQ | Method::OrthQ => {
            let (feats, q_lib) = quantum_block(fmap, data, p_noise)?;
            diag_r2 = Some(r2_q(&feats.q, &data.xdot)?);
            diag_frac = Some(frac_variance_in_p(&p_lib.matrix, &feats.q)?);
            if method == Method::NaiveQ {
                theta = FeatureLibrary::concat(&[&p_lib, &q_lib]);
            } else {
                let orth = orthogonalize(&feats.q, &p_lib.matrix)?;
                let orth_lib = orth.into_library(q_lib.labels.clone(), Family::Quantum);
                theta = FeatureLibrary::concat(&[&p_lib, &orth_lib]);
            }
        }
        Method::Rbf => {
            let r_lib = rbf_block(data, cfg, seed)?;
            diag_r2 = Some(r2_q(&r_lib.matrix, &data.xdot)?);
            diag_frac = Some(frac_variance_in_p(&p_lib.matrix, &r_lib.matrix)?);
            theta = FeatureLibrary::concat(&[&p_lib, &r_lib]);
        }
    }

    let model = stlsq(&theta, &data.xdot, spec.stlsq_threshold, 20);
    let score = tpr(&model, &xi_true)?;
    Ok((score.tpr, diag_r2, diag_frac))
}

/// Runs every configured method on one (system, sigma, trial) cell. The base
/// trajectory is integrated once by the caller and shared across cells.
#[allow(clippy::too_many_arguments)]
pub fn run_cell(
    spec: &SystemSpec,
    base: &Trajectory,
    sigma: f64,
    sigma_index: usize,
    trial: usize,
    cfg: &ExperimentConfig,
    methods: &[Method],
    p_noise: f64,
) -> Result<Vec<ExperimentRecord>> {
    let seed = cell_seed(cfg.base_seed, &spec.name, sigma_index, trial);
    let annotate = |e: Error| Error::Cell {
        context: format!("{} sigma={} trial={}", spec.name, sigma, trial),
        source: Box::new(e),
    };
    let data = prepare_cell(base, sigma, seed, cfg.smooth_window).map_err(annotate)?;
    let fmap = feature_map_for(spec, cfg.feature_map);

    let mut records = Vec::with_capacity(methods.len());
    for &method in methods {
        let start = Instant::now();
        let (tpr_value, r2, frac) = fit_method(spec, &data, method, &fmap, p_noise, cfg, seed)
            .map_err(|e| Error::Cell {
                context: format!(
                    "{} sigma={} trial={} method={}",
                    spec.name,
                    sigma,
                    trial,
                    method.name()
                ),
                source: Box::new(e),
            })?;
        records.push(ExperimentRecord {
            system: spec.name.clone(),
            method: method.name().to_string(),
            feature_map: if method == Method::Vanilla {
                "none".to_string()
            } else if method == Method::Rbf {
                "rbf".to_string()
            } else {
                fmap.kind.name().to_string()
            },
            sigma,
            trial,
            seed,
            tpr: tpr_value,
            r2_q: r2,
            frac_var_in_p: frac,
            wall_time_ms: start.elapsed().as_millis(),
        });
    }
    Ok(records)
}
