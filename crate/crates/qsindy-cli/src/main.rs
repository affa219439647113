//! Command-line harness for the qsindy experiments.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 verification failure.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use qsindy::harness::{self, ExperimentConfig, Method, PlotKind, RunMeta};
use qsindy::Error;

#[derive(Parser)]
#[command(
    name = "qsindy",
    about = "Sparse equation discovery with quantum feature libraries",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct CommonOpts {
    /// TOML config file; CLI flags override its keys
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV/JSON results
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Base seed for the deterministic noise streams
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Trials per (system, noise level) cell
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Dense noise sweep over systems x noise levels x trials x methods
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
        /// Comma-separated system list
        #[arg(long)]
        systems: Option<String>,
        /// Comma-separated method list
        #[arg(long)]
        methods: Option<String>,
        /// Feature map for the planar systems: zz2|zz3|iqp|reupload
        #[arg(long)]
        feature_map: Option<String>,
        /// Per-gate depolarizing strength for the quantum features
        #[arg(long)]
        depolarizing_p: Option<f64>,
    },
    /// RBF bandwidth x landmark-count grid on Duffing
    RbfGrid {
        #[command(flatten)]
        common: CommonOpts,
        /// Observation noise level
        #[arg(long)]
        sigma: Option<f64>,
    },
    /// Diagnostics, correlations, and leave-k-out validation over the ten
    /// (system, feature map) combinations
    Diagnose {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// TPR vs per-gate depolarizing strength on Duffing
    HwNoise {
        #[command(flatten)]
        common: CommonOpts,
        /// Observation noise level
        #[arg(long)]
        sigma: Option<f64>,
    },
    /// Identify the Burgers right-hand side from a solved field
    Burgers {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Machine-precision checks of the bias identity and the STLSQ
    /// preservation property
    Verify {
        #[command(flatten)]
        common: CommonOpts,
        /// Negative control: inject this error into the projected block and
        /// confirm the verifier catches it (the run then exits 2)
        #[arg(long)]
        perturb: Option<f64>,
    },
    /// Render a results CSV as SVG
    Plot {
        /// Input CSV produced by sweep, rbf-grid, or hw-noise
        input: PathBuf,
        /// Plot family: sweep|rbf-grid|hw-noise
        #[arg(long)]
        kind: String,
        /// Output directory for the SVG files
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
}

fn load_config(common: &CommonOpts) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg.base_seed = seed;
    }
    if let Some(trials) = common.trials {
        cfg.n_trials = trials;
    }
    if let Some(jobs) = common.jobs {
        cfg.jobs = Some(jobs);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(|p| p.trim().to_string())
        .filter(|p| !p.is_empty())
        .collect()
}

fn meta(cfg: &ExperimentConfig, command: &str, n_records: usize, started: Instant) -> RunMeta {
    RunMeta {
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        base_seed: cfg.base_seed,
        n_trials: cfg.n_trials,
        systems: cfg.systems.clone(),
        feature_map: cfg.feature_map.name().to_string(),
        n_records,
        total_wall_ms: started.elapsed().as_millis(),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Sweep {
            common,
            systems,
            methods,
            feature_map,
            depolarizing_p,
        } => {
            let started = Instant::now();
            let mut cfg = load_config(&common)?;
            if let Some(systems) = systems {
                cfg.systems = parse_list(&systems);
            }
            if let Some(methods) = methods {
                cfg.methods = parse_list(&methods)
                    .iter()
                    .map(|m| {
                        Method::parse(m)
                            .ok_or_else(|| Error::Config(format!("unknown method `{m}`")))
                    })
                    .collect::<Result<_, _>>()?;
            }
            if let Some(fmap) = feature_map {
                cfg.feature_map = qsindy::feature_maps::FeatureMapKind::parse(&fmap)
                    .ok_or_else(|| Error::Config(format!("unknown feature map `{fmap}`")))?;
            }
            if let Some(p) = depolarizing_p {
                cfg.depolarizing_p = p;
            }
            cfg.validate()?;
            let output = harness::run_sweep(&cfg)?;
            harness::write_sweep_outputs(&cfg.output_dir, &output)?;
            harness::write_run_meta(
                &cfg.output_dir,
                &meta(&cfg, "sweep", output.records.len(), started),
            )?;
            println!("system              method    sigma    mean_tpr  [min, max]");
            for row in &output.summary {
                println!(
                    "{:<19} {:<9} {:<8} {:.3}     [{:.2}, {:.2}]",
                    row.system, row.method, row.sigma, row.mean_tpr, row.min_tpr, row.max_tpr
                );
            }
            println!(
                "wrote {} records to {}",
                output.records.len(),
                cfg.output_dir.join("sweep.csv").display()
            );
        }
        Command::RbfGrid { common, sigma } => {
            let started = Instant::now();
            let cfg = load_config(&common)?;
            let sigma = sigma.unwrap_or(harness::DEFAULT_GRID_SIGMA);
            let output = harness::run_rbf_grid(&cfg, sigma)?;
            harness::write_rbf_outputs(&cfg.output_dir, &output)?;
            harness::write_run_meta(
                &cfg.output_dir,
                &meta(&cfg, "rbf-grid", output.trials.len(), started),
            )?;
            println!(
                "vanilla reference mean TPR at sigma={sigma}: {:.3}",
                output.vanilla_mean_tpr
            );
            println!("gamma_mult  landmarks  mean_tpr");
            for cell in &output.cells {
                println!(
                    "{:<11} {:<10} {:.3}",
                    cell.gamma_mult, cell.landmarks, cell.mean_tpr
                );
            }
        }
        Command::Diagnose { common } => {
            let started = Instant::now();
            let cfg = load_config(&common)?;
            let output = harness::run_diagnostic_study(&cfg)?;
            harness::write_diagnose_outputs(&cfg.output_dir, &output)?;
            harness::write_run_meta(
                &cfg.output_dir,
                &meta(&cfg, "diagnose", output.records.len(), started),
            )?;
            println!("system              map       frac_var  r2_q    severity");
            for r in &output.records {
                println!(
                    "{:<19} {:<9} {:.4}    {:.4}  {:+.2}",
                    r.system, r.fmap, r.frac_var_in_p, r.r2_q, r.severity
                );
            }
            println!(
                "pearson: frac_var r={:.3} (p={:.4}), r2_q r={:.3} (p={:.4})",
                output.frac_var_correlation.0,
                output.frac_var_correlation.1,
                output.r2_q_correlation.0,
                output.r2_q_correlation.1
            );
            for row in &output.cv {
                println!(
                    "leave-{}-out ({} splits): frac_var MAE {:.4}, r2_q MAE {:.4}",
                    row.k, row.splits, row.mae_frac_var, row.mae_r2_q
                );
            }
        }
        Command::HwNoise { common, sigma } => {
            let started = Instant::now();
            let cfg = load_config(&common)?;
            let sigma = sigma.unwrap_or(harness::DEFAULT_OBS_SIGMA);
            let output = harness::run_hw_noise(&cfg, &harness::DEFAULT_P_GRID, sigma)?;
            harness::write_hw_outputs(&cfg.output_dir, &output)?;
            harness::write_run_meta(
                &cfg.output_dir,
                &meta(&cfg, "hw-noise", output.records.len(), started),
            )?;
            println!("p        method    mean_tpr");
            for &p in &harness::DEFAULT_P_GRID {
                for method in ["vanilla", "naive_q", "orth_q"] {
                    let values: Vec<f64> = output
                        .records
                        .iter()
                        .filter(|r| r.p == p && r.method == method)
                        .map(|r| r.tpr)
                        .collect();
                    let mean = values.iter().sum::<f64>() / values.len() as f64;
                    println!("{:<8} {:<9} {:.3}", p, method, mean);
                }
            }
        }
        Command::Burgers { common } => {
            let started = Instant::now();
            let cfg = load_config(&common)?;
            let report = harness::run_burgers(&cfg)?;
            harness::write_burgers_outputs(&cfg.output_dir, &report)?;
            harness::write_run_meta(&cfg.output_dir, &meta(&cfg, "burgers", 3, started))?;
            println!(
                "plain fit: u_t = {:.5} uxx + {:.5} u*ux   (truth: 0.1, -1)",
                report.vanilla_uxx, report.vanilla_u_ux
            );
            println!(
                "r2_q = {:.4}, frac_var_in_p = {:.4}",
                report.r2_q, report.frac_var_in_p
            );
            for m in &report.methods {
                println!(
                    "{:<9} tpr {:.2}  active terms: {:?}",
                    m.method, m.tpr, m.terms
                );
            }
        }
        Command::Verify { common, perturb } => {
            let started = Instant::now();
            let cfg = load_config(&common)?;
            let outcome = harness::run_verify(&cfg, perturb)?;
            harness::write_verify_outputs(&cfg.output_dir, &outcome)?;
            harness::write_run_meta(
                &cfg.output_dir,
                &meta(&cfg, "verify", outcome.reports.len(), started),
            )?;
            for (system, fmap, report, passed) in &outcome.reports {
                println!(
                    "{} + {}: bias relative error {:.3e}, orth deviation {:.3e} -> {}",
                    system,
                    fmap,
                    report.max_relative_error,
                    report.orth_deviation,
                    if *passed { "ok" } else { "FAILED" }
                );
            }
            for row in &outcome.preservation {
                println!(
                    "stlsq preservation {}: max deviation {:.3e} -> {}",
                    row.system,
                    row.max_deviation,
                    if row.passed { "ok" } else { "FAILED" }
                );
            }
            if !outcome.passed {
                return Err(Error::VerificationFailure {
                    max_relative_error: outcome
                        .reports
                        .iter()
                        .map(|(_, _, r, _)| r.max_relative_error)
                        .fold(0.0, f64::max),
                    orth_deviation: outcome
                        .reports
                        .iter()
                        .map(|(_, _, r, _)| r.orth_deviation)
                        .fold(0.0, f64::max),
                });
            }
            println!("all verification bounds hold");
        }
        Command::Plot { input, kind, out } => {
            let kind = PlotKind::parse(&kind)
                .ok_or_else(|| Error::Config(format!("unknown plot kind `{kind}`")))?;
            let files = harness::render_plot(&input, kind, &out)?;
            for f in files {
                println!("wrote {}", f.display());
            }
        }
    }
    Ok(())
}

/// Restore the default SIGPIPE disposition so `qsindy ... | head` terminates
/// quietly instead of panicking on a closed pipe.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are success, anything else is usage error
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::VerificationFailure {
            max_relative_error,
            orth_deviation,
        }) => {
            eprintln!(
                "verification failed: bias relative error {max_relative_error:.3e}, \
                 orth deviation {orth_deviation:.3e}"
            );
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
