use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::ops::Range;

use super::systems::SystemSpec;
use crate::error::{Error, Result};

/// States above this magnitude abort integration: nothing in the benchmark
/// suite comes anywhere near it, so reaching it means the step size or
/// initial condition is wrong.
const DIVERGENCE_LIMIT: f64 = 1e6;

/// A uniformly sampled state history.
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Sample times, `times[i] = i * dt`.
    pub times: Vec<f64>,
    /// Row i is the state at `times[i]`; shape (N, d).
    pub states: DMatrix<f64>,
    pub dt: f64,
}

impl Trajectory {
    /// Builds a trajectory and checks the grid/shape invariants.
    pub fn new(times: Vec<f64>, states: DMatrix<f64>, dt: f64) -> Result<Self> {
        if times.len() < 10 {
            return Err(Error::Degenerate(format!(
                "trajectory needs >= 10 samples, got {}",
                times.len()
            )));
        }
        if times.len() != states.nrows() {
            return Err(Error::Degenerate(
                "times and states row count differ".into(),
            ));
        }
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::Degenerate("dt must be positive".into()));
        }
        for w in times.windows(2) {
            if ((w[1] - w[0]) - dt).abs() > 1e-12 * dt.max(1.0) {
                return Err(Error::Degenerate("time grid is not uniform".into()));
            }
        }
        if states.iter().any(|v| !v.is_finite()) {
            return Err(Error::Degenerate("states contain NaN/Inf".into()));
        }
        Ok(Self { times, states, dt })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states.ncols()
    }

    /// Writes the trajectory as CSV with header `t,x0,...,x{d-1}`.
    pub fn to_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        write!(w, "t")?;
        for j in 0..self.dim() {
            write!(w, ",x{j}")?;
        }
        writeln!(w)?;
        for i in 0..self.len() {
            write!(w, "{}", self.times[i])?;
            for j in 0..self.dim() {
                write!(w, ",{}", self.states[(i, j)])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Time-derivative estimate on the interior rows of a trajectory.
#[derive(Clone, Debug)]
pub struct DerivativeEstimate {
    /// Shape (len(valid_rows), d).
    pub xdot: DMatrix<f64>,
    /// Trajectory rows the estimate covers (boundary rows are trimmed).
    pub valid_rows: Range<usize>,
}

/// Fixed-step RK4 from `spec.initial_condition`; returns `n_steps + 1` rows.
pub fn integrate(spec: &SystemSpec, dt: f64, n_steps: usize) -> Result<Trajectory> {
    assert!(dt > 0.0, "dt must be positive");
    assert!(n_steps >= 10, "need at least 10 steps");
    let d = spec.dim;
    let n = n_steps + 1;
    let mut states = DMatrix::zeros(n, d);
    let mut x = spec.initial_condition.clone();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    let mut tmp = vec![0.0; d];

    for j in 0..d {
        states[(0, j)] = x[j];
    }
    for step in 0..n_steps {
        spec.rhs(&x, &mut k1);
        for j in 0..d {
            tmp[j] = x[j] + 0.5 * dt * k1[j];
        }
        spec.rhs(&tmp, &mut k2);
        for j in 0..d {
            tmp[j] = x[j] + 0.5 * dt * k2[j];
        }
        spec.rhs(&tmp, &mut k3);
        for j in 0..d {
            tmp[j] = x[j] + dt * k3[j];
        }
        spec.rhs(&tmp, &mut k4);
        for j in 0..d {
            x[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        let magnitude = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if !magnitude.is_finite() || magnitude > DIVERGENCE_LIMIT {
            return Err(Error::Divergence {
                step: step + 1,
                magnitude,
            });
        }
        for j in 0..d {
            states[(step + 1, j)] = x[j];
        }
    }

    let times = (0..n).map(|i| i as f64 * dt).collect();
    Ok(Trajectory { times, states, dt })
}

/// Adds i.i.d. Gaussian observation noise to the states. The same
/// `(trajectory, sigma, seed)` always produces bitwise-identical output.
pub fn add_noise(traj: &Trajectory, sigma: f64, seed: u64) -> Trajectory {
    assert!(sigma >= 0.0, "sigma must be non-negative");
    if sigma == 0.0 {
        return traj.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("sigma checked non-negative");
    let mut states = traj.states.clone();
    for i in 0..states.nrows() {
        for j in 0..states.ncols() {
            states[(i, j)] += normal.sample(&mut rng);
        }
    }
    Trajectory {
        times: traj.times.clone(),
        states,
        dt: traj.dt,
    }
}

/// Centered moving-average smoothing followed by second-order centered
/// differences. Trims `smooth_window/2 + 1` rows at each boundary;
/// `valid_rows` records the retained range.
pub fn estimate_derivative(traj: &Trajectory, smooth_window: usize) -> Result<DerivativeEstimate> {
    assert!(
        smooth_window >= 1 && smooth_window % 2 == 1,
        "window must be odd and >= 1"
    );
    let n = traj.len();
    let d = traj.dim();
    let half = smooth_window / 2;
    let trim = half + 1;
    if n < smooth_window + 2 || n < 2 * trim {
        return Err(Error::WindowTooLarge {
            window: smooth_window,
            remaining: 0,
        });
    }
    let valid = trim..(n - trim);
    if valid.len() < 10 {
        return Err(Error::WindowTooLarge {
            window: smooth_window,
            remaining: valid.len(),
        });
    }

    // smoothed values exist wherever the full window fits: rows half..n-half
    let smooth_at = |i: usize, j: usize| -> f64 {
        let mut acc = 0.0;
        for k in (i - half)..=(i + half) {
            acc += traj.states[(k, j)];
        }
        acc / smooth_window as f64
    };

    let mut xdot = DMatrix::zeros(valid.len(), d);
    for (row, i) in valid.clone().enumerate() {
        for j in 0..d {
            xdot[(row, j)] = (smooth_at(i + 1, j) - smooth_at(i - 1, j)) / (2.0 * traj.dt);
        }
    }
    Ok(DerivativeEstimate {
        xdot,
        valid_rows: valid,
    })
}

/// Places the system's ground-truth coefficients into a dense matrix aligned
/// with `column_labels` (one column per state dimension).
pub fn assemble_true_xi(spec: &SystemSpec, column_labels: &[String]) -> Result<DMatrix<f64>> {
    let mut xi = DMatrix::zeros(column_labels.len(), spec.dim);
    for term in &spec.true_coefficients {
        let row = column_labels
            .iter()
            .position(|l| l == &term.label)
            .ok_or_else(|| Error::MissingLabel(term.label.clone()))?;
        xi[(row, term.target)] = term.value;
    }
    Ok(xi)
}
