use std::path::PathBuf;

use serde::Deserialize;

use crate::dynamics::SystemSpec;
use crate::error::{Error, Result};
use crate::feature_maps::FeatureMapKind;

/// Baseline observation-noise grid for the planar systems; the 3-D systems
/// multiply it by their amplitude scale.
pub const BASE_NOISE_GRID: [f64; 7] = [0.0, 0.01, 0.02, 0.05, 0.08, 0.10, 0.12];

/// Fitting method compared by the harness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// Polynomial library alone.
    Vanilla,
    /// Straight concatenation `[P, Q]`.
    NaiveQ,
    /// Orthogonalized concatenation `[P, Q_perp]`.
    OrthQ,
    /// Classical RBF control, `[P, R]`.
    Rbf,
}

impl Method {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "vanilla" => Some(Self::Vanilla),
            "naive_q" => Some(Self::NaiveQ),
            "orth_q" => Some(Self::OrthQ),
            "rbf" => Some(Self::Rbf),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Vanilla => "vanilla",
            Self::NaiveQ => "naive_q",
            Self::OrthQ => "orth_q",
            Self::Rbf => "rbf",
        }
    }

    pub fn all() -> Vec<Method> {
        vec![Self::Vanilla, Self::NaiveQ, Self::OrthQ, Self::Rbf]
    }
}

/// Harness configuration; a TOML file sets the same keys and CLI flags
/// override it.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub systems: Vec<String>,
    pub methods: Vec<Method>,
    /// Feature map used for the planar systems; 3-D systems always encode
    /// through the rescaled 3-qubit map.
    pub feature_map: FeatureMapKind,
    /// When unset, each system uses `BASE_NOISE_GRID` times its amplitude
    /// scale.
    pub noise_levels: Option<Vec<f64>>,
    pub n_trials: usize,
    pub base_seed: u64,
    pub depolarizing_p: f64,
    pub output_dir: PathBuf,
    pub smooth_window: usize,
    pub rbf_landmarks: usize,
    pub rbf_gamma_mult: f64,
    pub jobs: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            systems: vec!["duffing".into(), "van_der_pol".into(), "lorenz".into()],
            methods: Method::all(),
            feature_map: FeatureMapKind::Zz2,
            noise_levels: None,
            n_trials: 5,
            base_seed: 1234,
            depolarizing_p: 0.0,
            output_dir: PathBuf::from("results"),
            smooth_window: 5,
            rbf_landmarks: 12,
            rbf_gamma_mult: 1.0,
            jobs: None,
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    systems: Option<Vec<String>>,
    methods: Option<Vec<String>>,
    feature_map: Option<String>,
    noise_levels: Option<Vec<f64>>,
    n_trials: Option<usize>,
    base_seed: Option<u64>,
    depolarizing_p: Option<f64>,
    output_dir: Option<String>,
    smooth_window: Option<usize>,
    rbf_landmarks: Option<usize>,
    rbf_gamma_mult: Option<f64>,
    jobs: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("bad config: {e}")))?;
        let mut cfg = Self::default();
        if let Some(systems) = raw.systems {
            cfg.systems = systems;
        }
        if let Some(methods) = raw.methods {
            cfg.methods = methods
                .iter()
                .map(|m| {
                    Method::parse(m).ok_or_else(|| Error::Config(format!("unknown method `{m}`")))
                })
                .collect::<Result<_>>()?;
        }
        if let Some(fmap) = raw.feature_map {
            cfg.feature_map = FeatureMapKind::parse(&fmap)
                .ok_or_else(|| Error::Config(format!("unknown feature map `{fmap}`")))?;
        }
        cfg.noise_levels = raw.noise_levels.or(cfg.noise_levels);
        if let Some(v) = raw.n_trials {
            cfg.n_trials = v;
        }
        if let Some(v) = raw.base_seed {
            cfg.base_seed = v;
        }
        if let Some(v) = raw.depolarizing_p {
            cfg.depolarizing_p = v;
        }
        if let Some(v) = raw.output_dir {
            cfg.output_dir = PathBuf::from(v);
        }
        if let Some(v) = raw.smooth_window {
            cfg.smooth_window = v;
        }
        if let Some(v) = raw.rbf_landmarks {
            cfg.rbf_landmarks = v;
        }
        if let Some(v) = raw.rbf_gamma_mult {
            cfg.rbf_gamma_mult = v;
        }
        cfg.jobs = raw.jobs.or(cfg.jobs);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::Config("n_trials must be >= 1".into()));
        }
        if self.systems.is_empty() {
            return Err(Error::Config("at least one system required".into()));
        }
        for name in &self.systems {
            if SystemSpec::by_name(name).is_none() {
                return Err(Error::Config(format!("unknown system `{name}`")));
            }
        }
        if let Some(levels) = &self.noise_levels {
            if levels.iter().any(|s| *s < 0.0) {
                return Err(Error::Config("noise levels must be non-negative".into()));
            }
            if levels.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::Config("noise levels must be sorted".into()));
            }
        }
        if !(0.0..=1.0).contains(&self.depolarizing_p) {
            return Err(Error::Config("depolarizing_p must lie in [0, 1]".into()));
        }
        if self.smooth_window.is_multiple_of(2) {
            return Err(Error::Config("smooth_window must be odd".into()));
        }
        Ok(())
    }

    /// The noise grid used for a given system.
    pub fn noise_grid(&self, spec: &SystemSpec) -> Vec<f64> {
        match &self.noise_levels {
            Some(levels) => levels.clone(),
            None => BASE_NOISE_GRID
                .iter()
                .map(|s| s * spec.noise_scale())
                .collect(),
        }
    }
}
