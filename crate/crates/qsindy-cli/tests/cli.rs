//! End-to-end checks of the binary: subcommands, file outputs, exit codes,
//! and rerun determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_qsindy")
}

fn run(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .output()
        .expect("spawn qsindy")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qsindy_cli_{tag}"));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn assert_exit(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn verify_passes_and_writes_reports() {
    let dir = temp_dir("verify");
    let output = run(&["verify", "--out", dir.to_str().unwrap()]);
    assert_exit(&output, 0);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("all verification bounds hold"));
    assert!(dir.join("bias_reports.json").exists());
    assert!(dir.join("preservation.csv").exists());
    assert!(dir.join("run_meta.json").exists());
}

#[test]
fn perturbed_verify_exits_two() {
    let dir = temp_dir("verify_perturbed");
    let output = run(&[
        "verify",
        "--perturb",
        "1e-3",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_exit(&output, 2);
}

#[test]
fn unknown_system_exits_one() {
    let output = run(&["sweep", "--systems", "not_a_system"]);
    assert_exit(&output, 1);
}

#[test]
fn bad_config_file_exits_one() {
    let dir = temp_dir("badconfig");
    let path = dir.join("bad.toml");
    std::fs::write(&path, "n_trials = 0\n").unwrap();
    let output = run(&["sweep", "--config", path.to_str().unwrap()]);
    assert_exit(&output, 1);
}

#[test]
fn help_exits_zero() {
    assert_exit(&run(&["--help"]), 0);
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap()
}

#[test]
fn sweep_is_deterministic_and_plots() {
    let dir_a = temp_dir("sweep_a");
    let dir_b = temp_dir("sweep_b");
    let args = |out: &Path| {
        vec![
            "sweep".to_string(),
            "--systems".into(),
            "duffing".into(),
            "--methods".into(),
            "vanilla,orth_q".into(),
            "--trials".into(),
            "2".into(),
            "--seed".into(),
            "77".into(),
            "--out".into(),
            out.to_str().unwrap().to_string(),
        ]
    };
    let run_strings = |args: Vec<String>| {
        Command::new(binary())
            .args(&args)
            .output()
            .expect("spawn qsindy")
    };
    assert_exit(&run_strings(args(&dir_a)), 0);
    assert_exit(&run_strings(args(&dir_b)), 0);
    assert_eq!(
        read(&dir_a.join("sweep.csv")),
        read(&dir_b.join("sweep.csv"))
    );
    assert_eq!(
        read(&dir_a.join("sweep_summary.csv")),
        read(&dir_b.join("sweep_summary.csv"))
    );

    // header contract
    let text = std::fs::read_to_string(dir_a.join("sweep.csv")).unwrap();
    assert!(text.starts_with("system,method,feature_map,sigma,trial,seed,tpr,r2_q,frac_var_in_p"));

    // plot from the emitted CSV
    let output = run(&[
        "plot",
        dir_a.join("sweep.csv").to_str().unwrap(),
        "--kind",
        "sweep",
        "--out",
        dir_a.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    assert!(dir_a.join("sweep_duffing.svg").exists());
}

#[test]
fn rbf_and_hw_plots_render() {
    let dir = temp_dir("plots");
    let grid = dir.join("rbf_grid.csv");
    std::fs::write(
        &grid,
        "gamma_mult,landmarks,mean_tpr\n0.5,3,0.1\n0.5,6,0.0\n1,3,0.4\n1,6,0.2\n",
    )
    .unwrap();
    let output = run(&[
        "plot",
        grid.to_str().unwrap(),
        "--kind",
        "rbf-grid",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    let heatmap = std::fs::read_to_string(dir.join("rbf_grid.svg")).unwrap();
    assert!(heatmap.contains("<rect"));

    let hw = dir.join("hw_noise.csv");
    std::fs::write(
        &hw,
        "p,method,trial,tpr\n0,vanilla,0,1\n0,orth_q,0,1\n0.01,vanilla,0,1\n0.01,orth_q,0,1\n",
    )
    .unwrap();
    let output = run(&[
        "plot",
        hw.to_str().unwrap(),
        "--kind",
        "hw-noise",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    assert!(dir.join("hw_noise.svg").exists());
}

#[test]
fn plot_rejects_empty_csv() {
    let dir = temp_dir("plot_empty");
    let path = dir.join("empty.csv");
    std::fs::write(
        &path,
        "system,method,feature_map,sigma,trial,seed,tpr,r2_q,frac_var_in_p\n",
    )
    .unwrap();
    let output = run(&[
        "plot",
        path.to_str().unwrap(),
        "--kind",
        "sweep",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_exit(&output, 1);
}

#[test]
fn config_file_keys_are_honored() {
    let dir = temp_dir("config");
    let config = dir.join("run.toml");
    std::fs::write(
        &config,
        format!(
            "systems = [\"duffing\"]\nmethods = [\"vanilla\"]\nfeature_map = \"iqp\"\n\
             noise_levels = [0.0]\nn_trials = 1\nbase_seed = 5\noutput_dir = \"{}\"\n",
            dir.display()
        ),
    )
    .unwrap();
    let output = run(&["sweep", "--config", config.to_str().unwrap()]);
    assert_exit(&output, 0);
    let text = std::fs::read_to_string(dir.join("sweep.csv")).unwrap();
    assert_eq!(text.lines().count(), 2); // header + one record
}
