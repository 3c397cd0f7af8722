//! Black-box checks of the command-line front end: exit codes, printed
//! output, manifest contents, and the output-directory environment override.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scene_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes/reference_room.toml")
}

fn isacmap(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isacmap"))
        .args(args)
        .env_remove("ISACMAP_OUT_DIR")
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

// --- exit codes --------------------------------------------------------------

#[test]
fn unknown_subcommand_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = isacmap(dir.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_flag_value_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = isacmap(dir.path(), &["golay", "--check", "not-a-number"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_power_of_two_golay_length_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = isacmap(dir.path(), &["golay", "--check", "96"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error: "), "stderr was {err:?}");
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn missing_input_file_exits_with_data_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = isacmap(dir.path(), &["extract", "--in", "does-not-exist"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error: "), "stderr was {err:?}");
}

#[test]
fn malformed_scene_exits_with_data_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "schema_version = 99\n").unwrap();
    let out = isacmap(dir.path(), &["simulate", "--scene", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

// --- printed output ----------------------------------------------------------

#[test]
fn golay_check_prints_peak_and_sidelobe() {
    let dir = tempfile::tempdir().unwrap();
    let out = isacmap(dir.path(), &["golay", "--check", "128"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout, "peak=256 max_sidelobe=0\n");
}

// --- manifests ---------------------------------------------------------------

#[test]
fn extract_manifest_records_the_gate_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let sim = isacmap(
        dir.path(),
        &[
            "simulate",
            "--scene",
            scene_path().to_str().unwrap(),
            "--seed",
            "3",
            "--out",
            "sim",
        ],
    );
    assert_eq!(sim.status.code(), Some(0));
    let ext = isacmap(
        dir.path(),
        &[
            "extract", "--in", "sim", "--out", "ext", "--pmin", "-48.5", "--kmax", "3",
        ],
    );
    assert_eq!(ext.status.code(), Some(0));
    let manifest = std::fs::read_to_string(dir.path().join("ext/manifest.toml")).unwrap();
    assert!(manifest.contains("command = \"extract\""), "{manifest}");
    assert!(manifest.contains("p_min_db = -48.5"), "{manifest}");
    assert!(manifest.contains("k_max = 3"), "{manifest}");
    assert!(manifest.contains("dtau_min_ns = 2.2"), "{manifest}");
    assert!(manifest.contains("r_min_m = 0.5"), "{manifest}");
}

#[test]
fn simulate_manifest_records_seed_and_scene() {
    let dir = tempfile::tempdir().unwrap();
    let sim = isacmap(
        dir.path(),
        &[
            "simulate",
            "--scene",
            scene_path().to_str().unwrap(),
            "--seed",
            "11",
            "--out",
            "sim",
        ],
    );
    assert_eq!(sim.status.code(), Some(0));
    let manifest = std::fs::read_to_string(dir.path().join("sim/manifest.toml")).unwrap();
    assert!(manifest.contains("seed = 11"), "{manifest}");
    assert!(manifest.contains("reference_room.toml"), "{manifest}");
}

// --- environment override ----------------------------------------------------

#[test]
fn out_dir_env_var_overrides_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let envdir = dir.path().join("redirected");
    let out = Command::new(env!("CARGO_BIN_EXE_isacmap"))
        .args([
            "simulate",
            "--scene",
            scene_path().to_str().unwrap(),
            "--seed",
            "3",
            "--out",
            "ignored",
        ])
        .env("ISACMAP_OUT_DIR", &envdir)
        .current_dir(dir.path())
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0));
    assert!(envdir.join("manifest.toml").exists());
    assert!(!dir.path().join("ignored").exists());
}
