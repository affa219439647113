use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// One (system, method, noise level, trial) result row.
///
/// `wall_time_ms` is measured per cell but intentionally left out of the
/// results CSV so that reruns with the same seed stay byte-identical; the
/// aggregate lands in `run_meta.json`.
#[derive(Clone, Debug)]
pub struct ExperimentRecord {
    pub system: String,
    pub method: String,
    pub feature_map: String,
    pub sigma: f64,
    pub trial: usize,
    pub seed: u64,
    pub tpr: f64,
    pub r2_q: Option<f64>,
    pub frac_var_in_p: Option<f64>,
    pub wall_time_ms: u128,
}

pub(crate) fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes records as CSV with the documented header.
pub fn write_records_csv(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        out,
        "system,method,feature_map,sigma,trial,seed,tpr,r2_q,frac_var_in_p"
    )?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.system,
            r.method,
            r.feature_map,
            r.sigma,
            r.trial,
            r.seed,
            r.tpr,
            fmt_opt(r.r2_q),
            fmt_opt(r.frac_var_in_p),
        )?;
    }
    Ok(())
}

/// Provenance for one harness run.
#[derive(Clone, Debug, Serialize)]
pub struct RunMeta {
    pub command: String,
    pub version: String,
    pub base_seed: u64,
    pub n_trials: usize,
    pub systems: Vec<String>,
    pub feature_map: String,
    pub n_records: usize,
    pub total_wall_ms: u128,
}

pub fn write_run_meta(dir: &Path, meta: &RunMeta) -> Result<()> {
    let file = std::fs::File::create(dir.join("run_meta.json"))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), meta)
        .map_err(|e| crate::error::Error::Config(format!("meta serialization: {e}")))?;
    Ok(())
}
