//! Determinism and CLI-surface checks: identical (subcommand, args, seed)
//! must produce byte-identical CSV output.

use std::path::Path;
use std::process::Command;

fn bvlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bvlab"))
}

fn run_in(dir: &Path, args: &[&str]) -> std::process::Output {
    bvlab()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn bvlab")
}

#[test]
fn criterion_12_bv_rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "bv",
        "--pi",
        "delta",
        "--x",
        "1e4",
        "--A",
        "1",
        "--B",
        "1",
        "--seed",
        "7",
        "--out",
        "run.csv",
        "--tau-cache",
        "tau.bin",
    ];
    let out1 = run_in(dir.path(), &args);
    assert!(out1.status.success(), "{}", String::from_utf8_lossy(&out1.stderr));
    let first = std::fs::read(dir.path().join("run.csv")).unwrap();
    let out2 = run_in(dir.path(), &args);
    assert!(out2.status.success());
    let second = std::fs::read(dir.path().join("run.csv")).unwrap();
    assert_eq!(first, second, "rerun changed the CSV bytes");
    assert!(dir.path().join("run.csv.manifest.json").exists());
    println!("acceptance: 12 determinism: PASS (byte-identical rerun)");
}

#[test]
fn titchmarsh_rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "titchmarsh",
        "--pi",
        "zeta",
        "--x",
        "1e3,1e4",
        "--kind",
        "integers",
        "--seed",
        "3",
        "--out",
        "t.csv",
    ];
    let out1 = run_in(dir.path(), &args);
    assert!(out1.status.success(), "{}", String::from_utf8_lossy(&out1.stderr));
    let first = std::fs::read(dir.path().join("t.csv")).unwrap();
    run_in(dir.path(), &args);
    let second = std::fs::read(dir.path().join("t.csv")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn verify_suite_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["verify", "--suite", "characters", "--seed", "1", "--trials", "100"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("[PASS] characters/orthogonality"));
    assert!(dir.path().join("verify-failures.json.manifest.json").exists());
}

#[test]
fn missing_pi_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["titchmarsh", "--pi", "nonsense", "--x", "1e3"]);
    assert!(!out.status.success());
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.ini"),
        "pi = zeta\nx = 1e3,1e4\nkind = integers\nB = 1\n",
    )
    .unwrap();
    // Config alone.
    let out = run_in(
        dir.path(),
        &["titchmarsh", "--config", "run.ini", "--out", "a.csv"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // Flag overrides the ladder (single x).
    let out = run_in(
        dir.path(),
        &[
            "titchmarsh",
            "--config",
            "run.ini",
            "--x",
            "1e3",
            "--out",
            "b.csv",
        ],
    );
    assert!(out.status.success());
    let a = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_eq!(a.lines().count(), 3);
    assert_eq!(b.lines().count(), 2);
}

#[test]
fn env_seed_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let out = bvlab()
        .current_dir(dir.path())
        .env("BVLAB_SEED", "42")
        .args(["verify", "--suite", "symcore", "--trials", "50"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
