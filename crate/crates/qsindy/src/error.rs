use thiserror::Error;

/// Errors produced by the qsindy library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("trajectory diverged: |state| reached {magnitude:.3e} at step {step}")]
    Divergence { step: usize, magnitude: f64 },

    #[error("smoothing window {window} leaves only {remaining} valid rows (need >= 10)")]
    WindowTooLarge { window: usize, remaining: usize },

    #[error("label `{0}` is not present in the feature library")]
    MissingLabel(String),

    #[error("feature map expects {expected} input coordinates, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("matrix is rank deficient (condition number {cond:.3e})")]
    RankDeficient { cond: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("labels do not align: {0}")]
    LabelMisalignment(String),

    #[error("PDE solution unstable: max |u| grew to {0:.3e}")]
    PdeUnstable(f64),

    #[error(
        "verification failed: max relative bias error {max_relative_error:.3e}, \
         orthogonalized deviation {orth_deviation:.3e}"
    )]
    VerificationFailure {
        max_relative_error: f64,
        orth_deviation: f64,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Cell {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("csv schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
