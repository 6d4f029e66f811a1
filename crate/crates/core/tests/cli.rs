use std::process::Command;

use classgroup::verify::ClassGroupResult;

fn classgroup(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_classgroup")).args(args).output().unwrap()
}

#[test]
fn compute_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = classgroup(&["compute", "--poly", "x^2+x+6", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let res: ClassGroupResult = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(res.h, 3);
    assert_eq!(res.divisors, vec![3]);

    let out = classgroup(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    // a wrong class number must fail the analytic check
    let mut bad = res.clone();
    bad.h = 9;
    bad.divisors = vec![9];
    std::fs::write(&path, serde_json::to_string(&bad).unwrap()).unwrap();
    let out = classgroup(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracles() {
    let out = classgroup(&["oracle", "imag", "-D", "-71"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["h"], 7);

    let out = classgroup(&["oracle", "real", "-D", "5"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["regulator"].as_f64().unwrap() - 0.48121182505960347).abs() < 1e-12);

    let out = classgroup(&["oracle", "imag", "-D", "5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn errors_name_the_stage() {
    let out = classgroup(&["compute", "--poly", "x^2-4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error ["));

    let out = classgroup(&["compute", "--poly", "2x^2+1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn params_and_bench() {
    let out = classgroup(&["params", "--poly", "x^3-2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.is_object());

    let out = classgroup(&["bench", "--poly", "x^3-2", "--seed", "3"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["h"], 1);
    assert!(v["stats"]["trials"].as_u64().unwrap() > 0);
}
