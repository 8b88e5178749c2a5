//! End-to-end behavior of the `mgp` binary and the command layer.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mgp"))
}

const LOGISTIC_MODEL: &str = r#"
d = 3
r = 3
matrix = [
  [1.0, 0.0, 0.0],
  [0.5, 0.5, 0.0],
  [0.3333333333333333, 0.3333333333333333, 0.3333333333333333],
]

[[factors]]
family = "logistic"
alpha = 0.5

[[factors]]
family = "logistic"
alpha = 0.5

[[factors]]
family = "logistic"
alpha = 0.5
"#;

const ZERO_COLUMN_MODEL: &str = r#"
d = 2
r = 2
matrix = [[1.0, 0.0], [1.0, 0.0]]

[[factors]]
family = "logistic"
alpha = 0.5

[[factors]]
family = "logistic"
alpha = 0.5
"#;

fn write_model(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn validate_prints_weights_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(&dir, "logistic.toml", LOGISTIC_MODEL);
    let output = bin().arg("validate").arg(&model).output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("d = 3"));
    assert!(stdout.contains("signatures: {1,2,3} {2,3} {3}"));
    assert!(stdout.contains("face weights: 0.555311 0.286029 0.158660"), "{stdout}");
}

#[test]
fn validate_zero_column_exits_two_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(&dir, "zero.toml", ZERO_COLUMN_MODEL);
    let output = bin().arg("validate").arg(&model).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("EmptyColumnError"), "{stderr}");
}

#[test]
fn validate_malformed_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(&dir, "broken.toml", "d = [not toml");
    let output = bin().arg("validate").arg(&model).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn validate_stdf_at_evaluates_points() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(&dir, "logistic.toml", LOGISTIC_MODEL);
    let output = bin()
        .arg("validate")
        .arg(&model)
        .arg("--stdf-at")
        .arg("1,1,1")
        .arg("--stdf-at")
        .arg("0,1,0")
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("stdf(1,1,1) = 2.1009252"), "{stdout}");
    assert!(stdout.contains("stdf(0,1,0) = 1"), "{stdout}");
}

#[test]
fn validate_echo_roundtrips_to_the_same_model() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(&dir, "logistic.toml", LOGISTIC_MODEL);
    let echoed = bin().arg("validate").arg(&model).arg("--echo").output().unwrap();
    assert!(echoed.status.success());
    let echo_path = dir.path().join("echo.toml");
    fs::write(&echo_path, &echoed.stdout).unwrap();

    let a = bin().arg("validate").arg(&model).output().unwrap();
    let b = bin().arg("validate").arg(&echo_path).output().unwrap();
    assert!(b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn simulate_is_deterministic_and_floors_transform() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(&dir, "logistic.toml", LOGISTIC_MODEL);
    let out1 = dir.path().join("a.csv");
    let out2 = dir.path().join("b.csv");
    for out in [&out1, &out2] {
        let status = bin()
            .arg("simulate")
            .arg(&model)
            .args(["-n", "100", "--seed", "5", "--transform", "4"])
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = fs::read(&out1).unwrap();
    let b = fs::read(&out2).unwrap();
    assert_eq!(a, b);

    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "Z1,Z2,Z3");
    // points concentrate on the three faces; the floor is exactly -4
    let mut seen_faces = std::collections::BTreeSet::new();
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 3);
        let pattern: Vec<bool> = cols.iter().map(|c| *c == "-4").collect();
        seen_faces.insert(pattern.clone());
        for c in cols {
            let v: f64 = c.parse().unwrap();
            assert!(v >= -4.0);
        }
    }
    assert_eq!(seen_faces.len(), 3, "expected exactly the three extreme directions");
}

#[test]
fn simulate_single_sample_has_positive_coordinate() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(&dir, "logistic.toml", LOGISTIC_MODEL);
    let output = bin()
        .arg("simulate")
        .arg(&model)
        .args(["-n", "1", "--seed", "9"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    let has_positive = row
        .split(',')
        .filter(|c| *c != "-inf")
        .any(|c| c.parse::<f64>().unwrap() > 0.0);
    assert!(has_positive, "{row}");
}

#[test]
fn env_seed_is_used_when_flag_is_absent() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(&dir, "logistic.toml", LOGISTIC_MODEL);
    let with_flag = bin()
        .arg("simulate")
        .arg(&model)
        .args(["-n", "20", "--seed", "77"])
        .output()
        .unwrap();
    let with_env = bin()
        .arg("simulate")
        .arg(&model)
        .args(["-n", "20"])
        .env("MGP_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(with_flag.stdout, with_env.stdout);
}

#[test]
fn density_of_simulated_points_is_never_minus_inf() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(&dir, "logistic.toml", LOGISTIC_MODEL);
    let samples = dir.path().join("samples.csv");
    assert!(bin()
        .arg("simulate")
        .arg(&model)
        .args(["-n", "200", "--seed", "3"])
        .arg("--out")
        .arg(&samples)
        .status()
        .unwrap()
        .success());
    let output = bin()
        .arg("density")
        .arg(&model)
        .arg("--points")
        .arg(&samples)
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "log_density");
    let mut rows = 0;
    for line in lines {
        assert_ne!(line, "-inf");
        let _: f64 = line.parse().unwrap();
        rows += 1;
    }
    assert_eq!(rows, 200);
}

#[test]
fn density_flags_off_support_points() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(&dir, "logistic.toml", LOGISTIC_MODEL);
    let points = dir.path().join("points.csv");
    // all-negative point and a point on the unsupported face {1,3}
    fs::write(&points, "Y1,Y2,Y3\n-1.0,-2.0,-0.5\n0.5,-inf,0.5\n").unwrap();
    let output = bin()
        .arg("density")
        .arg(&model)
        .arg("--points")
        .arg(&points)
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows, vec!["-inf", "-inf"]);
}

#[test]
fn density_oracle_column_reports_small_discrepancy() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(&dir, "logistic.toml", LOGISTIC_MODEL);
    let samples = dir.path().join("samples.csv");
    assert!(bin()
        .arg("simulate")
        .arg(&model)
        .args(["-n", "20", "--seed", "8"])
        .arg("--out")
        .arg(&samples)
        .status()
        .unwrap()
        .success());
    let output = bin()
        .arg("density")
        .arg(&model)
        .arg("--points")
        .arg(&samples)
        .arg("--oracle")
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "log_density,oracle_density,rel_discrepancy");
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let rel: f64 = cols[2].parse().unwrap();
        assert!(rel < 1e-6, "{line}");
    }
}

#[test]
fn report_passes_on_a_healthy_batch() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(&dir, "logistic.toml", LOGISTIC_MODEL);
    let output = bin()
        .arg("report")
        .arg(&model)
        .args(["-n", "2000", "--seed", "12", "--workers", "2"])
        .output()
        .unwrap();
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(output.status.success(), "{stdout}");
    assert!(stdout.contains("direction"));
    assert!(stdout.contains("{1,2,3}"));
    assert!(stdout.contains("0.5553"), "{stdout}");
    assert!(stdout.contains("max(Y) ~ Exp(1) KS"));
    assert!(stdout.contains("acceptance rate"));
}

#[test]
fn missing_model_file_exits_one() {
    let output = bin().arg("validate").arg("/nonexistent/model.toml").output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn duplicate_signatures_warn_on_stderr_but_validate() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(
        &dir,
        "dup.toml",
        r#"
d = 2
r = 2
matrix = [[0.5, 0.5], [0.4, 0.6]]

[[factors]]
family = "logistic"
alpha = 0.5

[[factors]]
family = "logistic"
alpha = 0.7
"#,
    );
    let output = bin().arg("validate").arg(&model).output().unwrap();
    assert!(output.status.success());
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("warning"), "{stderr}");
    assert!(stderr.contains("share signature {1,2}"), "{stderr}");
}
