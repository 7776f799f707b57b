use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn lorenz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lorenz"))
        .args(args)
        .env_remove("LORENZ_TOL")
        .env_remove("LORENZ_DEPTH")
        .env_remove("LORENZ_MAX_STEPS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn check_verdicts_and_exit_codes() {
    let o = lorenz(&["check", "(10) (011)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "Expansive");
    assert_eq!(lorenz(&["check", "(10) (01)"]).status.code(), Some(2));
    let o = lorenz(&["check", "(01) (10)"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("Invalid: k+ must start 10"));
}

#[test]
fn parse_error_reports_position_on_stderr() {
    let o = lorenz(&["check", "(10) (011"]);
    assert_eq!(o.status.code(), Some(64));
    assert!(o.stdout.is_empty());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("position"), "{err}");
}

#[test]
fn factor_and_params_reports() {
    let o = lorenz(&["factor", "(100101) (0110)"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("step 1: (10, 01) Periodic (1, 1/2)"), "{text}");
    assert!(text.contains("terminal: (100) (01) (1.324718, 0.245122)"), "{text}");

    let text = stdout(&lorenz(&["factor", "1(0) 0(1)"]));
    assert!(text.starts_with("prime"));
    assert!(text.contains("(2.000000, 0.000000)"));

    let text = stdout(&lorenz(&["params", "(10) (011)"]));
    assert!(text.contains("beta = 1.3247179"), "{text}");
    assert!(text.contains("alpha = 0.4301597"), "{text}");
    let text = stdout(&lorenz(&["params", "(100101) (0110)"]));
    assert!(text.contains("beta = 1.1509639"), "{text}");
    assert!(text.contains("alpha = 0.4188763"), "{text}");
}

#[test]
fn params_without_linear_model() {
    let o = lorenz(&["params", "100(01) 01(100)"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("beta = n/a"), "{text}");
    assert!(text.contains("(1.324718, 0.245122) PrimePeriodic; (2.000000, 0.000000) PrimeExpansive"), "{text}");
}

#[test]
fn rotational_input_to_params_is_a_data_error() {
    let o = lorenz(&["params", "(10) (01)"]);
    assert_eq!(o.status.code(), Some(65));
    assert!(o.stdout.is_empty());
}

#[test]
fn dist_values() {
    let o = lorenz(&["dist", "(10001) (01100)", "1000110001(110) 0110001100(01)"]);
    assert!(stdout(&o).starts_with("1.000732421875 "));
    let o = lorenz(&["dist", "(10001) (01100)", "10001(100) 01100(01)"]);
    assert!(stdout(&o).starts_with("0.625 "));
    let o = lorenz(&["dist", "(10) (011)", "10(10) (011)"]);
    assert!(stdout(&o).starts_with("0 "));
}

#[test]
fn matrix_command() {
    let text = stdout(&lorenz(&["matrix", "(10) (011)"]));
    assert!(text.contains("spectral radius = 1.3247"), "{text}");
    let o = lorenz(&["matrix", "1(0) 0(1)"]);
    assert_eq!(o.status.code(), Some(65));
    assert!(String::from_utf8_lossy(&o.stderr).contains("requires purely periodic invariant"));
}

#[test]
fn json_literals_round_trip() {
    let o = lorenz(&["--json", "factor", "(100010010) (010100)"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let kp = v["kplus"].as_str().unwrap();
    let km = v["kminus"].as_str().unwrap();
    let again = lorenz(&["--json", "factor", &format!("{kp} {km}")]);
    assert_eq!(o.stdout, again.stdout);
    assert_eq!(v["steps"][0]["point"]["rho"], "1/3");
    let t = &v["terminal"];
    let lit = format!("{} {}", t["kplus"].as_str().unwrap(), t["kminus"].as_str().unwrap());
    assert_eq!(lorenz(&["check", &lit]).status.code(), Some(0));
}

#[test]
fn env_overrides_flags() {
    let o = Command::new(env!("CARGO_BIN_EXE_lorenz"))
        .args(["--json", "factor", "(100101) (0110)"])
        .env("LORENZ_MAX_STEPS", "0")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["truncated"], true);
    assert_eq!(v["steps"].as_array().unwrap().len(), 0);
}

#[test]
fn sweep_csv_and_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("grid.csv");
    let o = lorenz(&[
        "sweep", "--beta", "1:1", "--alpha", "0:1", "--alpha-mode", "absolute", "--grid", "3x3", "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "beta,alpha,class,detail");
    assert_eq!(rows.len(), 10);
    assert!(rows[1..].iter().all(|r| r.split(',').nth(2) == Some("rotation")));

    let cell = dir.path().join("cell.csv");
    lorenz(&["sweep", "--beta", "2:2", "--alpha", "0:0", "--grid", "1x1", "--out", cell.to_str().unwrap()]);
    assert!(fs::read_to_string(&cell).unwrap().contains(",prime_expansive,"));

    let pgm = dir.path().join("grid.pgm");
    let o = lorenz(&[
        "sweep", "--beta", "1.2:1.8", "--alpha", "0:1", "--alpha-mode", "absolute", "--grid", "4x5", "--format",
        "pgm", "--out", pgm.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let bytes = fs::read(&pgm).unwrap();
    let header = b"P5\n5 4\n255\n";
    assert_eq!(&bytes[..header.len()], header);
    assert_eq!(bytes.len(), header.len() + 20);
    // α = 1 exceeds 2 − β on every row past the first.
    assert_eq!(bytes[header.len() + 4 + 5], 0);
}

#[test]
fn sweep_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        lorenz(&["sweep", "--beta", "1.3:1.9", "--grid", "8x8", "--out", p.to_str().unwrap()]);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn unwritable_output_exits_73() {
    let o = lorenz(&["sweep", "--grid", "2x2", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(73));
}
