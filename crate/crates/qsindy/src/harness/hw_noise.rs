//! Hardware-noise robustness: the Duffing cell at fixed observation noise,
//! with the quantum features evaluated through depolarizing channels of
//! increasing per-gate strength. Observation-noise seeds depend only on the
//! trial, so both the plain reference and the per-trial pairing stay fixed
//! across the channel-strength grid.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use super::config::{ExperimentConfig, Method};
use super::pipeline::run_cell;
use super::with_pool;
use crate::dynamics::{integrate, SystemSpec};
use crate::error::Result;

pub const DEFAULT_P_GRID: [f64; 5] = [0.0, 0.005, 0.01, 0.015, 0.02];
pub const DEFAULT_OBS_SIGMA: f64 = 0.02;

#[derive(Clone, Debug)]
pub struct HwRecord {
    pub p: f64,
    pub method: String,
    pub trial: usize,
    pub tpr: f64,
}

#[derive(Clone, Debug)]
pub struct HwNoiseOutput {
    pub sigma_obs: f64,
    pub records: Vec<HwRecord>,
}

/// Runs the channel-strength sweep with methods vanilla / naive_q / orth_q.
pub fn run_hw_noise(
    cfg: &ExperimentConfig,
    p_grid: &[f64],
    sigma_obs: f64,
) -> Result<HwNoiseOutput> {
    cfg.validate()?;
    let spec = SystemSpec::duffing();
    let base = integrate(&spec, spec.default_dt(), spec.default_steps())?;
    let methods = [Method::Vanilla, Method::NaiveQ, Method::OrthQ];

    let mut jobs = Vec::new();
    for &p in p_grid {
        for trial in 0..cfg.n_trials {
            jobs.push((p, trial));
        }
    }

    let nested: Vec<Vec<HwRecord>> = with_pool(cfg.jobs, || {
        jobs.par_iter()
            .map(|&(p, trial)| {
                // sigma_index 0: the observation noise must not depend on p
                let records = run_cell(&spec, &base, sigma_obs, 0, trial, cfg, &methods, p)?;
                Ok(records
                    .into_iter()
                    .map(|r| HwRecord {
                        p,
                        method: r.method,
                        trial,
                        tpr: r.tpr,
                    })
                    .collect())
            })
            .collect::<Result<_>>()
    })??;

    let mut records: Vec<HwRecord> = nested.into_iter().flatten().collect();
    records.sort_by(|a, b| {
        a.p.partial_cmp(&b.p)
            .unwrap()
            .then(a.method.cmp(&b.method))
            .then(a.trial.cmp(&b.trial))
    });
    Ok(HwNoiseOutput { sigma_obs, records })
}

/// Writes `hw_noise.csv`.
pub fn write_hw_outputs(dir: &Path, output: &HwNoiseOutput) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut out = std::io::BufWriter::new(std::fs::File::create(dir.join("hw_noise.csv"))?);
    writeln!(out, "p,method,trial,tpr")?;
    for r in &output.records {
        writeln!(out, "{},{},{},{}", r.p, r.method, r.trial, r.tpr)?;
    }
    Ok(())
}
