//! Viscous Burgers equation on a periodic domain, solved by method of lines:
//! centered second-order stencils in space, RK4 in time.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Solution field for the PDE run, with the spatial derivatives cached using
/// the same stencils the solver stepped with.
#[derive(Clone, Debug)]
pub struct PdeField {
    pub grid_x: Vec<f64>,
    pub grid_t: Vec<f64>,
    /// u(t_i, x_j), shape (n_t, n_x).
    pub u: DMatrix<f64>,
    /// Centered first derivative in x.
    pub ux: DMatrix<f64>,
    /// Centered second derivative in x.
    pub uxx: DMatrix<f64>,
    pub nu: f64,
}

/// Default initial profile: a Gaussian pulse centered mid-domain that
/// steepens into the shock structure which makes the advection term
/// identifiable.
pub fn gaussian_pulse(x: f64, domain_length: f64) -> f64 {
    let c = domain_length / 2.0;
    (-(x - c) * (x - c) / 0.5).exp()
}

fn periodic_rhs(u: &[f64], dx: f64, nu: f64, out: &mut [f64]) {
    let n = u.len();
    for i in 0..n {
        let left = u[(i + n - 1) % n];
        let right = u[(i + 1) % n];
        let ux = (right - left) / (2.0 * dx);
        let uxx = (right - 2.0 * u[i] + left) / (dx * dx);
        out[i] = nu * uxx - u[i] * ux;
    }
}

/// Integrates `u_t = nu u_xx - u u_x` on the periodic domain `[0, L)` from
/// the profile `u0` (sampled on the grid), storing `n_t` uniformly spaced
/// time slices including t = 0. Internal RK4 substeps are chosen to respect
/// the diffusive and advective stability limits.
pub fn solve_burgers(
    nu: f64,
    n_x: usize,
    n_t: usize,
    domain_length: f64,
    t_final: f64,
    u0: &[f64],
) -> Result<PdeField> {
    assert!(nu > 0.0, "nu must be positive");
    assert!(n_x >= 8 && n_t >= 3, "grid too small");
    assert_eq!(u0.len(), n_x, "u0 must be sampled on the n_x grid");

    let dx = domain_length / n_x as f64;
    let dt_sample = t_final / (n_t - 1) as f64;
    let u0_max = u0.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let blowup_limit = 10.0 * u0_max.max(1e-12);

    // substeps respect the diffusive limit dx^2/(2 nu) with margin for the
    // RK4 stability region; advection-dominated inputs that outrun this are
    // caught by the runtime blow-up guard below
    let dt_diffusive = 0.4 * dx * dx / (2.0 * nu);
    let substeps = (dt_sample / dt_diffusive).ceil().max(1.0) as usize;
    let dt = dt_sample / substeps as f64;

    let mut u = u0.to_vec();
    let n = n_x;
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    let mut field = DMatrix::zeros(n_t, n_x);
    field.row_mut(0).copy_from_slice(&u);

    for slice in 1..n_t {
        for _ in 0..substeps {
            periodic_rhs(&u, dx, nu, &mut k1);
            for i in 0..n {
                tmp[i] = u[i] + 0.5 * dt * k1[i];
            }
            periodic_rhs(&tmp, dx, nu, &mut k2);
            for i in 0..n {
                tmp[i] = u[i] + 0.5 * dt * k2[i];
            }
            periodic_rhs(&tmp, dx, nu, &mut k3);
            for i in 0..n {
                tmp[i] = u[i] + dt * k3[i];
            }
            periodic_rhs(&tmp, dx, nu, &mut k4);
            for i in 0..n {
                u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        let umax = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if !umax.is_finite() || umax > blowup_limit {
            return Err(Error::PdeUnstable(umax));
        }
        field.row_mut(slice).copy_from_slice(&u);
    }

    // cache spatial derivatives with the same stencils
    let mut ux = DMatrix::zeros(n_t, n_x);
    let mut uxx = DMatrix::zeros(n_t, n_x);
    for t in 0..n_t {
        for i in 0..n_x {
            let left = field[(t, (i + n_x - 1) % n_x)];
            let right = field[(t, (i + 1) % n_x)];
            ux[(t, i)] = (right - left) / (2.0 * dx);
            uxx[(t, i)] = (right - 2.0 * field[(t, i)] + left) / (dx * dx);
        }
    }

    Ok(PdeField {
        grid_x: (0..n_x).map(|i| i as f64 * dx).collect(),
        grid_t: (0..n_t).map(|i| i as f64 * dt_sample).collect(),
        u: field,
        ux,
        uxx,
        nu,
    })
}

/// Flattens the field into regression data: one row per interior space-time
/// sample with features `(u, u_x, u_xx)` and target `u_t` from centered
/// differences over the stored time slices.
pub fn burgers_regression_data(field: &PdeField) -> (DMatrix<f64>, DMatrix<f64>) {
    let n_t = field.u.nrows();
    let n_x = field.u.ncols();
    assert!(n_t >= 3, "need at least 3 time slices for centered u_t");
    let dt = field.grid_t[1] - field.grid_t[0];
    let rows = (n_t - 2) * n_x;
    let mut features = DMatrix::zeros(rows, 3);
    let mut u_t = DMatrix::zeros(rows, 1);
    let mut r = 0;
    for t in 1..(n_t - 1) {
        for i in 0..n_x {
            features[(r, 0)] = field.u[(t, i)];
            features[(r, 1)] = field.ux[(t, i)];
            features[(r, 2)] = field.uxx[(t, i)];
            u_t[(r, 0)] = (field.u[(t + 1, i)] - field.u[(t - 1, i)]) / (2.0 * dt);
            r += 1;
        }
    }
    (features, u_t)
}
