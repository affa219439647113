use std::fmt;
use std::sync::Arc;

/// Vector field `f(x) -> out`, dimension-checked by the owning [`SystemSpec`].
pub type RhsFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// One nonzero entry of the ground-truth coefficient matrix: the monomial
/// `label` contributes `value` to the equation for state `target`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrueTerm {
    pub target: usize,
    pub label: String,
    pub value: f64,
}

impl TrueTerm {
    fn new(target: usize, label: &str, value: f64) -> Self {
        Self {
            target,
            label: label.to_string(),
            value,
        }
    }
}

/// A benchmark system: its vector field, initial condition, and the library
/// configuration used to identify it.
#[derive(Clone)]
pub struct SystemSpec {
    pub name: String,
    pub dim: usize,
    pub initial_condition: Vec<f64>,
    pub poly_degree: usize,
    pub stlsq_threshold: f64,
    pub true_coefficients: Vec<TrueTerm>,
    rhs: RhsFn,
}

impl fmt::Debug for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SystemSpec")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("initial_condition", &self.initial_condition)
            .field("poly_degree", &self.poly_degree)
            .field("stlsq_threshold", &self.stlsq_threshold)
            .finish_non_exhaustive()
    }
}

impl SystemSpec {
    pub fn new(
        name: &str,
        initial_condition: Vec<f64>,
        poly_degree: usize,
        stlsq_threshold: f64,
        true_coefficients: Vec<TrueTerm>,
        rhs: RhsFn,
    ) -> Self {
        Self {
            name: name.to_string(),
            dim: initial_condition.len(),
            initial_condition,
            poly_degree,
            stlsq_threshold,
            true_coefficients,
            rhs,
        }
    }

    /// Evaluates the vector field at `x` into `out`.
    pub fn rhs(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        (self.rhs)(x, out)
    }

    /// Damped oscillator with a cubic stiffness term.
    pub fn duffing() -> Self {
        Self::new(
            "duffing",
            vec![1.0, 0.0],
            3,
            0.05,
            vec![
                TrueTerm::new(0, "x1", 1.0),
                TrueTerm::new(1, "x0", -1.0),
                TrueTerm::new(1, "x1", -0.1),
                TrueTerm::new(1, "x0^3", -0.3),
            ],
            Arc::new(|x, out| {
                out[0] = x[1];
                out[1] = -x[0] - 0.3 * x[0].powi(3) - 0.1 * x[1];
            }),
        )
    }

    /// Relaxation oscillator, mu = 1.
    pub fn van_der_pol() -> Self {
        Self::new(
            "van_der_pol",
            vec![2.0, 0.0],
            3,
            0.05,
            vec![
                TrueTerm::new(0, "x1", 1.0),
                TrueTerm::new(1, "x0", -1.0),
                TrueTerm::new(1, "x1", 1.0),
                TrueTerm::new(1, "x0^2*x1", -1.0),
            ],
            Arc::new(|x, out| {
                out[0] = x[1];
                out[1] = (1.0 - x[0] * x[0]) * x[1] - x[0];
            }),
        )
    }

    /// Chaotic attractor, classic (10, 28, 8/3) parameters.
    pub fn lorenz() -> Self {
        Self::new(
            "lorenz",
            vec![1.0, 1.0, 1.0],
            2,
            0.1,
            vec![
                TrueTerm::new(0, "x0", -10.0),
                TrueTerm::new(0, "x1", 10.0),
                TrueTerm::new(1, "x0", 28.0),
                TrueTerm::new(1, "x1", -1.0),
                TrueTerm::new(1, "x0*x2", -1.0),
                TrueTerm::new(2, "x0*x1", 1.0),
                TrueTerm::new(2, "x2", -8.0 / 3.0),
            ],
            Arc::new(|x, out| {
                out[0] = 10.0 * (x[1] - x[0]);
                out[1] = x[0] * (28.0 - x[2]) - x[1];
                out[2] = x[0] * x[1] - 8.0 / 3.0 * x[2];
            }),
        )
    }

    /// Predator-prey oscillations.
    pub fn lotka_volterra() -> Self {
        Self::new(
            "lotka_volterra",
            vec![1.0, 1.0],
            2,
            0.05,
            vec![
                TrueTerm::new(0, "x0", 2.0 / 3.0),
                TrueTerm::new(0, "x0*x1", -4.0 / 3.0),
                TrueTerm::new(1, "x0*x1", 1.0),
                TrueTerm::new(1, "x1", -1.0),
            ],
            Arc::new(|x, out| {
                out[0] = 2.0 / 3.0 * x[0] - 4.0 / 3.0 * x[0] * x[1];
                out[1] = x[0] * x[1] - x[1];
            }),
        )
    }

    /// Conservative oscillator with a purely cubic restoring force.
    pub fn cubic_oscillator() -> Self {
        Self::new(
            "cubic_oscillator",
            vec![1.0, 0.0],
            3,
            0.05,
            vec![TrueTerm::new(0, "x1", 1.0), TrueTerm::new(1, "x0^3", -1.0)],
            Arc::new(|x, out| {
                out[0] = x[1];
                out[1] = -x[0].powi(3);
            }),
        )
    }

    /// Chaotic attractor with a single quadratic term, (0.2, 0.2, 5.7).
    pub fn rossler() -> Self {
        Self::new(
            "rossler",
            vec![1.0, 1.0, 1.0],
            2,
            0.1,
            vec![
                TrueTerm::new(0, "x1", -1.0),
                TrueTerm::new(0, "x2", -1.0),
                TrueTerm::new(1, "x0", 1.0),
                TrueTerm::new(1, "x1", 0.2),
                TrueTerm::new(2, "1", 0.2),
                TrueTerm::new(2, "x0*x2", 1.0),
                TrueTerm::new(2, "x2", -5.7),
            ],
            Arc::new(|x, out| {
                out[0] = -x[1] - x[2];
                out[1] = x[0] + 0.2 * x[1];
                out[2] = 0.2 + x[2] * (x[0] - 5.7);
            }),
        )
    }

    /// Looks a system up by its canonical name.
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "duffing" => Some(Self::duffing()),
            "van_der_pol" => Some(Self::van_der_pol()),
            "lorenz" => Some(Self::lorenz()),
            "lotka_volterra" => Some(Self::lotka_volterra()),
            "cubic_oscillator" => Some(Self::cubic_oscillator()),
            "rossler" => Some(Self::rossler()),
            _ => None,
        }
    }

    /// All six benchmark systems.
    pub fn benchmark_suite() -> Vec<Self> {
        vec![
            Self::duffing(),
            Self::van_der_pol(),
            Self::lorenz(),
            Self::lotka_volterra(),
            Self::cubic_oscillator(),
            Self::rossler(),
        ]
    }

    /// Integration step used by the experiment protocol. The 3-D systems run
    /// at a finer step because their velocities are an order of magnitude
    /// larger.
    pub fn default_dt(&self) -> f64 {
        if self.dim == 3 {
            0.002
        } else {
            0.01
        }
    }

    /// Step count for the default trajectory (10 s for planar systems, 20 s
    /// for the 3-D attractors so both lobes get visited).
    pub fn default_steps(&self) -> usize {
        if self.dim == 3 {
            10_000
        } else {
            1_000
        }
    }

    /// Multiplier applied to the baseline observation-noise grid. The 3-D
    /// attractors have ~10x larger amplitudes, so comparable relative
    /// perturbations need 10x larger sigma.
    pub fn noise_scale(&self) -> f64 {
        if self.dim == 3 {
            10.0
        } else {
            1.0
        }
    }
}
