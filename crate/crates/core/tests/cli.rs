use std::process::{Command, Output};

fn lsdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lsdiv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn kl_cauchy_json() {
    let o = lsdiv(&["kl", "cauchy:0,1", "cauchy:1,1", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"].as_f64(), Some(0.223143551));
    assert_eq!(v["method"], "closed_form");
    let keys: Vec<_> = v.as_object().unwrap().keys().take(4).cloned().collect();
    assert_eq!(keys, ["value", "method", "error_estimate", "converged"]);
}

#[test]
fn projection_json() {
    let o = lsdiv(&[
        "project",
        "--query",
        "halfnormal:0,1",
        "--target",
        "exponential",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.0484172947).abs() < 1e-9);
    assert!((v["optimum"]["s"].as_f64().unwrap() - 0.797884561).abs() < 1e-6);
}

#[test]
fn exit_codes() {
    assert_eq!(lsdiv(&["--help"]).status.code(), Some(0));
    assert_eq!(
        lsdiv(&["kl", "weibull:0,1", "normal:0,1"]).status.code(),
        Some(1)
    );
    assert_eq!(lsdiv(&["entropy", "normal:0,0"]).status.code(), Some(1));
    assert_eq!(
        lsdiv(&["project", "--query", "cauchy:0,1", "--target", "normal"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn negative_locations_parse() {
    let o = lsdiv(&["kl", "normal:-1,1", "normal:1,1"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("= 2.000000000"));
}

#[test]
fn full_battery_is_deterministic_and_passes() {
    let args = [
        "check", "--suite", "all", "--trials", "100", "--seed", "42", "--json",
    ];
    let a = lsdiv(&args);
    let b = lsdiv(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["failures"], 0);
}
