//! End-to-end CLI tests: exit codes, witnesses and trace files.

use std::path::Path;
use std::process::{Command, Output};

fn zetafix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zetafix"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

const GOLDEN_SMALL: &str = r#"
[domain]
kind = "interval_grid"
lo = 0.0
hi = 1.0
resolution = 50

[metric]
name = "max-or-zero"
expr = "if(x = y, 0, max(x, y))"

[map]
name = "halve-below-half"
expr = "if(x <= 0.5, x / 2, 0)"

[zeta]
family = "ratio"
f = "t + 2"
g = "t + 1"

[solver]
x0 = [0.1, 0.5, 0.9]
"#;

#[test]
fn verify_simfun_passes_for_banach() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[zeta]\nfamily = \"banach\"\nlambda = 0.5\n");
    let out = zetafix(&["verify-simfun", "--config", &config]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("zeta2"));
}

#[test]
fn verify_simfun_rejects_identity_difference_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[zeta]\nfamily = \"custom\"\nexpr = \"s - t\"\n",
    );
    let out = zetafix(&["verify-simfun", "--config", &config]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(
        text.contains("zeta2") && text.contains("witness"),
        "{}",
        text
    );
}

#[test]
fn malformed_expression_is_a_config_error_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[zeta]\nfamily = \"custom\"\nexpr = \"s - \"\n");
    let out = zetafix(&["verify-simfun", "--config", &config]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("position 4"), "{}", stderr(&out));
}

#[test]
fn unknown_config_keys_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[zeta]\nfamily = \"banach\"\nlambda = 0.5\nnope = 3\n",
    );
    let out = zetafix(&["verify-simfun", "--config", &config]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_passes_the_golden_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), GOLDEN_SMALL);
    let report_path = dir.path().join("reports.json");
    let out = zetafix(&[
        "check",
        "--config",
        &config,
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let json = std::fs::read_to_string(report_path).unwrap();
    assert!(json.contains("\"triangle\""));
}

#[test]
fn check_fails_identity_map_at_distance_preservation() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"
[domain]
kind = "finite_set"
points = [0.0, 1.0]

[metric]
expr = "abs(x - y)"

[map]
expr = "x"

[zeta]
family = "banach"
lambda = 0.5
"#,
    );
    let out = zetafix(&["check", "--config", &config]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("distance preservation"), "{}", text);
    assert!(text.contains("witness"), "{}", text);
    // the pipeline stops before the contraction stage
    assert!(!text.contains("z-contraction"), "{}", text);
}

#[test]
fn check_fails_squared_difference_at_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"
[domain]
kind = "finite_set"
points = [0.0, 0.5, 1.0]

[metric]
expr = "(x - y)^2"

[map]
expr = "x / 2"

[zeta]
family = "banach"
lambda = 0.5
"#,
    );
    let out = zetafix(&["check", "--config", &config]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("triangle"), "{}", stdout(&out));
}

#[test]
fn solve_converges_and_writes_traces() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), GOLDEN_SMALL);
    let stem = dir.path().join("trace");
    let out = zetafix(&[
        "solve",
        "--config",
        &config,
        "--out",
        stem.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    for k in 0..3 {
        let path = dir.path().join(format!("trace.{:02}.csv", k));
        let csv = std::fs::read_to_string(&path).unwrap();
        assert!(
            csv.starts_with("n,x_n,step_dist,cauchy_modulus\n"),
            "{}",
            csv
        );
    }
    assert!(dir.path().join("trace.summary.json").exists());
}

#[test]
fn solve_reports_truncation_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        &format!("{}\nmax_iter = 3\n", GOLDEN_SMALL.trim_end()),
    );
    let out = zetafix(&["solve", "--config", &config]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stdout(&out).contains("max_iter_exceeded"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn solve_force_skips_the_gate() {
    let dir = tempfile::tempdir().unwrap();
    // metric fails the triangle axiom, but --force lets the solve run
    let config = write_config(
        dir.path(),
        r#"
[domain]
kind = "finite_set"
points = [0.0, 0.5, 1.0]

[metric]
expr = "(x - y)^2"

[map]
expr = "if(x = 1, 0.5, 0)"

[zeta]
family = "banach"
lambda = 0.5

[solver]
x0 = [1.0]
"#,
    );
    let gated = zetafix(&["solve", "--config", &config]);
    assert_eq!(gated.status.code(), Some(1));
    let forced = zetafix(&["solve", "--config", &config, "--force"]);
    assert_eq!(forced.status.code(), Some(0), "{}", stdout(&forced));
}

#[test]
fn classify_reports_banach_half_for_halving() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"
[domain]
kind = "interval_grid"
lo = 0.0
hi = 1.0
resolution = 50

[metric]
expr = "abs(x - y)"

[map]
expr = "x / 2"
"#,
    );
    let out = zetafix(&["classify", "--config", &config]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(
        text.contains("banach     PASS  lambda = 5.00000e-1"),
        "{}",
        text
    );
    assert!(text.contains("z_contraction PASS"), "{}", text);
}

#[test]
fn classify_identity_fails_everything_but_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"
[domain]
kind = "finite_set"
points = [0.0, 1.0, 2.0]

[metric]
expr = "abs(x - y)"

[map]
expr = "x"
"#,
    );
    let out = zetafix(&["classify", "--config", &config]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("banach     FAIL"), "{}", text);
    assert!(text.contains("z_contraction FAIL"), "{}", text);
}

#[test]
fn reproduce_example2_passes_at_coarse_resolution() {
    let out = zetafix(&["reproduce-example2", "--resolution", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn reproduce_example2_rejects_injected_bad_zeta() {
    let out = zetafix(&[
        "reproduce-example2",
        "--resolution",
        "10",
        "--zeta",
        "s - t",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("zeta2"), "{}", stdout(&out));
}

#[test]
fn missing_config_file_is_a_usage_error() {
    let out = zetafix(&["check", "--config", "/nonexistent/config.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_rejects_start_outside_domain() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        &GOLDEN_SMALL.replace("x0 = [0.1, 0.5, 0.9]", "x0 = [1.5]"),
    );
    let out = zetafix(&["solve", "--config", &config]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}
