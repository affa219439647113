//! Experiment orchestration: configuration, deterministic seeding, the
//! per-cell fitting pipeline, the experiment commands (noise sweep, RBF
//! grid, diagnostic study, hardware-noise sweep, PDE run, verification), and
//! the CSV/JSON/SVG emitters.
//!
//! Determinism contract: a command run twice with the same config and seed
//! writes byte-identical result CSVs. Timing is kept out of the CSVs and
//! recorded in `run_meta.json` instead.

mod burgers;
mod config;
mod diagnose;
mod hw_noise;
mod pipeline;
mod plot;
mod rbf_grid;
mod records;
mod seed;
mod sweep;
mod verify;

pub use burgers::{run_burgers, write_burgers_outputs, BurgersReport, MethodCoefficients};
pub use config::{ExperimentConfig, Method, BASE_NOISE_GRID};
pub use diagnose::{
    reference_sigma, run_diagnostic_study, write_diagnose_outputs, CvRow, DiagnoseOutput,
    COMBINATIONS,
};
pub use hw_noise::{
    run_hw_noise, write_hw_outputs, HwNoiseOutput, HwRecord, DEFAULT_OBS_SIGMA, DEFAULT_P_GRID,
};
pub use pipeline::{feature_map_for, fit_method, prepare_cell, run_cell, CellData};
pub use plot::{render_plot, PlotKind};
pub use rbf_grid::{
    run_rbf_grid, write_rbf_outputs, RbfCell, RbfGridOutput, DEFAULT_GRID_SIGMA, GAMMA_MULTS,
    LANDMARK_COUNTS,
};
pub use records::{write_records_csv, write_run_meta, ExperimentRecord, RunMeta};
pub use seed::cell_seed;
pub use sweep::{run_sweep, summarize, write_sweep_outputs, SummaryRow, SweepOutput};
pub use verify::{
    run_verify, write_verify_outputs, PreservationRow, VerifyOutcome, BIAS_TOLERANCE,
    PRESERVATION_TOLERANCE, VERIFY_PAIRS,
};

use crate::error::Result;

/// Runs `f` on a rayon pool with the requested thread count, or the default
/// pool when unset.
pub(crate) fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| crate::error::Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
