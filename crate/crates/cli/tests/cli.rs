use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use micropolar_cli::checkpoint;
use micropolar_cli::output::{parse_csv, parse_report, CSV_HEADER};
use micropolar_cli::runner::{CHECKPOINT_NAME, CSV_NAME, LOCK_NAME, REPORT_NAME};

const SMALL: &str = r#"
[grid]
n = 16
L = 25.132741228718345

[params]
mu = 0.5
gamma = 0.3
chi = 0.2

[ic]
kind = "random_solenoidal"
peak = 0.75
amplitude = 0.3
seed = 4

[stepper]
dt = 0.05
t_end = 1.0

[output]
dir = "out"
cadence = 2
checkpoint_every = 5
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_micropolar"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(config: &Path) -> Output {
    bin().arg("run").arg(config).output().unwrap()
}

#[test]
fn run_writes_csv_report_and_checkpoint() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.toml", SMALL);
    let out = run(&cfg);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("out");
    let csv = fs::read_to_string(dir.join(CSV_NAME)).unwrap();
    assert!(csv.starts_with(&format!("{CSV_HEADER}\n")));
    let rows = parse_csv(&csv).unwrap();
    let times: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(times.len(), 11);
    assert!((times[10] - 1.0).abs() < 1e-12);
    assert!(rows.iter().all(|r| r[11] <= r[12] * (1.0 + 1e-8)));
    let report = parse_report(&fs::read_to_string(dir.join(REPORT_NAME)).unwrap());
    assert!(report.contains(&("status".into(), "completed".into())));
    assert!(report.iter().any(|(k, _)| k == "t0_detected"));
    let ck = checkpoint::read(&dir.join(CHECKPOINT_NAME)).unwrap();
    assert!((ck.state.t - 1.0).abs() < 1e-12);
    assert!(!dir.join(LOCK_NAME).exists());
}

#[test]
fn zero_amplitude_gives_zero_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "zero.toml", &SMALL.replace("amplitude = 0.3", "amplitude = 0.0"));
    assert!(run(&cfg).status.success());
    let rows = parse_csv(&fs::read_to_string(tmp.path().join("out").join(CSV_NAME)).unwrap()).unwrap();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r[1..].iter().all(|v| *v == 0.0)));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let a = write_config(tmp.path(), "a.toml", &SMALL.replace("\"out\"", "\"a\""));
    let b = write_config(tmp.path(), "b.toml", &SMALL.replace("\"out\"", "\"b\""));
    let out = bin().arg("run").arg(&a).arg(&b).env("MICROPOLAR_THREADS", "2").output().unwrap();
    assert!(out.status.success());
    for name in [CSV_NAME, REPORT_NAME, CHECKPOINT_NAME] {
        let x = fs::read(tmp.path().join("a").join(name)).unwrap();
        let y = fs::read(tmp.path().join("b").join(name)).unwrap();
        assert!(x == y, "{name} differs");
    }
}

#[test]
fn invalid_config_exits_two_with_location() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad.toml", &SMALL.replace("gamma = 0.3", "gamma = 0.3\nmu2 = 1.0"));
    let out = run(&cfg);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("mu2") && err.contains("line"), "{err}");
    let cfg = write_config(tmp.path(), "neg.toml", &SMALL.replace("mu = 0.5", "mu = -1.0"));
    let out = run(&cfg);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("params"));
    assert_eq!(run(&tmp.path().join("missing.toml")).status.code(), Some(2));
}

#[test]
fn unknown_suite_exits_two() {
    let out = bin().args(["verify", "nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite"));
}

#[test]
fn cfl_abort_exits_three_and_keeps_last_good_state() {
    let tmp = tempfile::tempdir().unwrap();
    let text = SMALL
        .replace("amplitude = 0.3", "amplitude = 3.0")
        .replace("dt = 0.05", "dt = 0.5")
        .replace("t_end = 1.0", "t_end = 10.0");
    let cfg = write_config(tmp.path(), "cfl.toml", &text);
    let out = run(&cfg);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("out");
    let ck = checkpoint::read(&dir.join(CHECKPOINT_NAME)).unwrap();
    assert!(ck.state.is_finite());
    let report = fs::read_to_string(dir.join(REPORT_NAME)).unwrap();
    assert!(report.contains("status = aborted"), "{report}");
    assert!(!dir.join(LOCK_NAME).exists());

    // a smaller step continues from the retained state
    let fixed = write_config(tmp.path(), "fixed.toml", &text.replace("dt = 0.5", "dt = 0.05"));
    let out = bin().arg("resume").arg(dir.join(CHECKPOINT_NAME)).arg(&fixed).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = parse_csv(&fs::read_to_string(dir.join(CSV_NAME)).unwrap()).unwrap();
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    assert!((rows.last().unwrap()[0] - 10.0).abs() < 1e-9);
    assert!(rows.iter().any(|r| r[0] == ck.state.t));
}

#[test]
fn resume_matches_uninterrupted_run() {
    let tmp = tempfile::tempdir().unwrap();
    let full = write_config(tmp.path(), "full.toml", &SMALL.replace("\"out\"", "\"full\""));
    assert!(run(&full).status.success());
    let half = write_config(
        tmp.path(),
        "half.toml",
        &SMALL.replace("\"out\"", "\"half\"").replace("t_end = 1.0", "t_end = 0.5"),
    );
    assert!(run(&half).status.success());
    let rest = write_config(tmp.path(), "rest.toml", &SMALL.replace("\"out\"", "\"half\""));
    let out = bin()
        .arg("resume")
        .arg(tmp.path().join("half").join(CHECKPOINT_NAME))
        .arg(&rest)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let a = checkpoint::read(&tmp.path().join("full").join(CHECKPOINT_NAME)).unwrap();
    let b = checkpoint::read(&tmp.path().join("half").join(CHECKPOINT_NAME)).unwrap();
    assert_eq!(a.state.t, b.state.t);
    assert_eq!(a.state.u, b.state.u);
    assert_eq!(a.state.w, b.state.w);
}

#[test]
fn resume_rejects_mismatched_dimensions() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.toml", SMALL);
    assert!(run(&cfg).status.success());
    let big = write_config(
        tmp.path(),
        "big.toml",
        &SMALL.replace("n = 16", "n = 32").replace("\"out\"", "\"big\""),
    );
    let out = bin()
        .arg("resume")
        .arg(tmp.path().join("out").join(CHECKPOINT_NAME))
        .arg(&big)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension mismatch"));
    let trunc = tmp.path().join("trunc.bin");
    let bytes = fs::read(tmp.path().join("out").join(CHECKPOINT_NAME)).unwrap();
    fs::write(&trunc, &bytes[..bytes.len() / 2]).unwrap();
    let out = bin().arg("resume").arg(&trunc).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn held_lock_refuses_a_second_writer() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.toml", SMALL);
    fs::create_dir_all(tmp.path().join("out")).unwrap();
    fs::write(tmp.path().join("out").join(LOCK_NAME), "1\n").unwrap();
    let out = run(&cfg);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("locked"));
    assert!(!tmp.path().join("out").join(CSV_NAME).exists());
}
