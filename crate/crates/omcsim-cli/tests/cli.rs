//! End-to-end checks of the command-line interface: exit codes, file
//! emission, determinism of data outputs.

use std::path::Path;
use std::process::{Command, Output};

fn omcsim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omcsim"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("failed to spawn omcsim")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

#[test]
fn resonant_transparency_row_in_spectrum_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = omcsim(
        &["spectrum", "--preset", "FIG1", "--n", "1", "--out", "o"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("o/spectrum.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "delta,re_r,im_r,re_t,im_t,r_mag2,t_mag2,phase_unwrapped,group_delay"
    );
    let row: Vec<&str> = csv
        .lines()
        .skip(1)
        .find(|l| l.starts_with("0,"))
        .expect("no delta = 0 row")
        .split(',')
        .collect();
    let t2: f64 = row[6].parse().unwrap();
    assert!((t2 - 1.0).abs() < 1e-9, "|t(0)|^2 = {t2}");
    // provenance sidecar, no data timestamps
    let meta = std::fs::read_to_string(dir.path().join("o/spectrum.meta.toml")).unwrap();
    assert!(meta.contains("subcommand = \"spectrum\""));
}

#[test]
fn bands_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["bands", "--preset", "fig1", "--points", "301", "--out", "a"];
    assert_eq!(code(&omcsim(&args, dir.path())), 0);
    let first = std::fs::read(dir.path().join("a/bands.csv")).unwrap();
    let args = ["bands", "--preset", "fig1", "--points", "301", "--out", "b"];
    assert_eq!(code(&omcsim(&args, dir.path())), 0);
    let second = std::fs::read(dir.path().join("b/bands.csv")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn svg_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a", "b"] {
        let out = omcsim(
            &[
                "spectrum", "--preset", "fig1", "--points", "101", "--format", "csv,svg", "--out",
                name,
            ],
            dir.path(),
        );
        assert_eq!(code(&out), 0);
    }
    let a = std::fs::read(dir.path().join("a/spectrum.svg")).unwrap();
    let b = std::fs::read(dir.path().join("b/spectrum.svg")).unwrap();
    assert_eq!(a, b);
    assert!(a.starts_with(b"<svg"));
}

#[test]
fn store_emits_run_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let out = omcsim(
        &["store", "--preset", "fig1", "--out", "o", "--format", "csv"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("efficiency"));
    assert!(dir.path().join("o/store.csv").exists());
    let metrics = std::fs::read_to_string(dir.path().join("o/store_metrics.txt")).unwrap();
    assert!(metrics.contains("ledger residual"));
}

#[test]
fn noise_and_pump_run_on_presets() {
    let dir = tempfile::tempdir().unwrap();
    let out = omcsim(&["noise", "--preset", "optimum", "--out", "o"], dir.path());
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("P_ph/P_noise"));
    let out = omcsim(
        &[
            "pump", "--preset", "optimum", "--points", "20", "--out", "o",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(dir.path().join("o/pump.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "delta_p,p_in,alpha,alpha_hat,flux"
    );
    assert!(csv.lines().count() > 20);
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"
        [params]
        omega1_hz = 2.0e14
        omega_m_hz = 1.0e10
        kappa_ex_hz = 2.4e9
        kappa_in_hz = 2.4e8
        q_m = 1.0e5
        omega_drive_hz = 2.4e8
        h_hz = 3.5e5
        n_elements = 4
        phase_per_cell_rad = 1.5707963267948966
        cell_transit_s = 2.0e-14
        t_base_k = 0.1
        chi_k = 2.0e-6

        [grid]
        points = 101
        span_hz = 1.0e9
    "#;
    std::fs::write(dir.path().join("run.toml"), cfg).unwrap();
    let out = omcsim(&["validate", "--config", "run.toml"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("validation: pass"));
    let out = omcsim(
        &["spectrum", "--config", "run.toml", "--out", "o"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(dir.path().join("o/spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count(), 102);
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&omcsim(&["frobnicate"], dir.path())), 1);
    assert_eq!(
        code(&omcsim(&["spectrum", "--preset", "nosuch"], dir.path())),
        1
    );
    assert_eq!(code(&omcsim(&["spectrum"], dir.path())), 1); // no source
    std::fs::write(dir.path().join("c.toml"), "preset = \"fig1\"").unwrap();
    assert_eq!(
        code(&omcsim(
            &["spectrum", "--preset", "fig1", "--config", "c.toml"],
            dir.path()
        )),
        1
    );
    assert_eq!(
        code(&omcsim(
            &["spectrum", "--preset", "fig1", "--format", "bogus"],
            dir.path()
        )),
        1
    );
    // help and version are not errors
    assert_eq!(code(&omcsim(&["--help"], dir.path())), 0);
    assert_eq!(code(&omcsim(&["--version"], dir.path())), 0);
}

#[test]
fn validation_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"
        [params]
        omega1_hz = 2.0e14
        omega_m_hz = 1.0e10
        kappa_ex_hz = 0.0
        kappa_in_hz = 2.4e8
        q_m = 1.0e5
        omega_drive_hz = 2.4e8
        h_hz = 3.5e5
        n_elements = 4
        phase_per_cell_rad = 1.5707963267948966
        cell_transit_s = 2.0e-14
        t_base_k = 0.1
        chi_k = 2.0e-6
    "#;
    std::fs::write(dir.path().join("bad.toml"), cfg).unwrap();
    let out = omcsim(&["validate", "--config", "bad.toml"], dir.path());
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stdout).contains("validation: fail"));
    // non-validate subcommands refuse invalid parameter sets the same way
    let out = omcsim(
        &["spectrum", "--config", "bad.toml", "--out", "o"],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn numerical_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    // bands with the drive off: the slow band does not exist
    let cfg = r#"
        [params]
        omega1_hz = 2.0e14
        omega_m_hz = 1.0e10
        kappa_ex_hz = 2.4e9
        kappa_in_hz = 2.4e8
        q_m = 1.0e5
        omega_drive_hz = 0.0
        h_hz = 3.5e5
        n_elements = 4
        phase_per_cell_rad = 1.5707963267948966
        cell_transit_s = 2.0e-14
        t_base_k = 0.1
        chi_k = 2.0e-6
    "#;
    std::fs::write(dir.path().join("off.toml"), cfg).unwrap();
    let out = omcsim(&["bands", "--config", "off.toml", "--out", "o"], dir.path());
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn warnings_are_advisory() {
    let dir = tempfile::tempdir().unwrap();
    // strong driving passes validation with a warning on stderr
    let cfg = r#"
        [params]
        omega1_hz = 2.0e14
        omega_m_hz = 1.0e10
        kappa_ex_hz = 2.4e9
        kappa_in_hz = 2.4e8
        q_m = 1.0e5
        omega_drive_hz = 6.0e9
        h_hz = 3.5e5
        n_elements = 4
        phase_per_cell_rad = 1.5707963267948966
        cell_transit_s = 2.0e-14
        t_base_k = 0.1
        chi_k = 2.0e-6
    "#;
    std::fs::write(dir.path().join("strong.toml"), cfg).unwrap();
    let out = omcsim(&["validate", "--config", "strong.toml"], dir.path());
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("weak-driving"));
}
