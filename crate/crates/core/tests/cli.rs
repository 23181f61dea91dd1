use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_grunsky-cert"))
}

fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
    )
}

#[test]
fn verify_passing_bound_exits_zero() {
    let (code, out) = run(&["verify", "f3"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("bound_id: f3"));
    assert!(out.contains("max_lo: 1.674896577"));
    assert!(out.contains("pass: true"));
}

#[test]
fn verify_budget_exhaustion_exits_two() {
    let (code, out) = run(&["verify", "f6", "--max-boxes", "10"]);
    assert_eq!(code, 2, "{out}");
    assert!(out.contains("status: budget_exhausted"));
}

#[test]
fn unknown_bound_and_bad_arguments_exit_64() {
    assert_eq!(run(&["verify", "f9"]).0, 64);
    assert_eq!(run(&["verify", "f1", "--tol", "-1"]).0, 64);
    assert_eq!(run(&["sample", "--scenario", "bogus", "--n", "10"]).0, 64);
    assert_eq!(run(&["sample", "--scenario", "odd_a5a3", "--n", "0"]).0, 64);
    assert_eq!(run(&["no-such-command"]).0, 64);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn json_report_parses() {
    let (code, out) = run(&["verify", "a5_minus_a3_odd", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["bound_id"], "a5_minus_a3_odd");
    assert_eq!(v["status"], "converged");
    assert_eq!(v["closed_form_pass"], true);
}

#[test]
fn sample_exit_code_tracks_violations() {
    let (code, out) = run(&[
        "sample",
        "--scenario",
        "odd_a5a3",
        "--n",
        "100000",
        "--seed",
        "42",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("violations: 0"));
    let (code, out) = run(&[
        "sample",
        "--scenario",
        "a3_zero",
        "--n",
        "100000",
        "--seed",
        "42",
    ]);
    assert_eq!(code, 1, "{out}");
}

#[test]
fn verify_all_is_byte_identical_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = ["a", "b", "c"].iter().map(|n| dir.path().join(n)).collect();
    for (p, w) in paths.iter().zip(["1", "1", "4"]) {
        let code = bin()
            .args(["verify-all", "--workers", w, "--out"])
            .arg(p)
            .status()
            .unwrap()
            .code()
            .unwrap();
        assert_eq!(code, 0);
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    assert_eq!(a, std::fs::read(&paths[2]).unwrap());
}

#[test]
fn grid_writes_csv() {
    let (code, out) = run(&["grid", "f1", "--resolution", "3"]);
    assert_eq!(code, 0);
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines[0], "x,f1");
    assert_eq!(lines.len(), 4);
    assert_eq!(run(&["grid", "f1", "--resolution", "1"]).0, 64);
}

#[test]
fn identities_exit_zero() {
    let (code, out) = run(&["identities", "--n", "1000"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("all_pass: true"));
}
