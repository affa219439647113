//! Benchmark dynamical systems, trajectory generation, observation noise,
//! and derivative estimation.

mod burgers;
mod integrate;
mod systems;

pub use burgers::{burgers_regression_data, gaussian_pulse, solve_burgers, PdeField};
pub use integrate::{
    add_noise, assemble_true_xi, estimate_derivative, integrate, DerivativeEstimate, Trajectory,
};
pub use systems::{SystemSpec, TrueTerm};
