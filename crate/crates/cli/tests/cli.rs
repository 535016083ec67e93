use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ribbonlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ribbonlab"))
        .args(args)
        .env_remove("RIBBONLAB_SEED")
        .output()
        .expect("binary runs")
}

fn json_out(args: &[&str]) -> Value {
    let out = ribbonlab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_vec(v).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

#[test]
fn ledger_minus_three() {
    assert_eq!(json_out(&["picard-ledger", "--ldeg", "-3", "--nmax", "3"]), serde_json::json!([2, 5]));
    let detail = json_out(&["picard-ledger", "--ldeg", "-3", "--nmax", "3", "--detail"]);
    assert_eq!(detail["ledger"], serde_json::json!([2, 5]));
    assert!(detail["criterion"].is_string());
}

#[test]
fn k3_worked_example() {
    let v = json_out(&["k3", "--eta1", "2", "--eta4", "3", "--gc", "2", "--gd", "2"]);
    assert_eq!(v["lattice_generator"], serde_json::json!([3, -2]));
    assert_eq!(v["projective"], false);
    assert_eq!(v["extends_to_x3"], false);
    let v = json_out(&["k3", "--irrational", "--gc", "2", "--gd", "3"]);
    assert_eq!(v["lattice_rank"], 0);
}

#[test]
fn trivial_scheme_validates_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let x = json_out(&["trivial", "--ldeg", "-2", "--n", "3"]);
    let path = write(dir.path(), "x.json", &x);
    let v = json_out(&["validate", &path]);
    assert_eq!(v["report"]["valid"], true);
    assert_eq!(v["kind"], "scheme");

    let b = json_out(&["pullback", "--scheme", &path, "--degree", "2"]);
    let bpath = write(dir.path(), "b.json", &b);
    assert_eq!(json_out(&["validate", &bpath])["kind"], "bundle");
    // Emitting a scheme and reading it back is stable.
    let again = json_out(&["pullback", "--scheme", &path, "--degree", "2"]);
    assert_eq!(b, again);
}

#[test]
fn broken_scheme_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut x = json_out(&["trivial", "--ldeg", "-2", "--n", "3"]);
    x["gluing"]["02"]["t"][1] = serde_json::json!([[-4, "3"]]);
    let path = write(dir.path(), "bad.json", &x);
    let out = ribbonlab(&["validate", &path]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["valid"], false);
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("mal.json");
    std::fs::write(&p, "{").unwrap();
    let out = ribbonlab(&["validate", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "Parse");

    let out = ribbonlab(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "Usage");

    let out = ribbonlab(&["k3", "--eta1", "1/0", "--eta4", "1", "--gc", "2", "--gd", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn extend_then_obstruction_difference() {
    let dir = tempfile::tempdir().unwrap();
    let x2 = json_out(&["trivial", "--ldeg", "-3", "--n", "2"]);
    let p2 = write(dir.path(), "x2.json", &x2);
    let x3 = json_out(&["extend", "--scheme", &p2, "--ideal-class", "1,-1/2"]);
    assert_eq!(x3["gluing"]["01"]["n"], 3);
    let p3 = write(dir.path(), "x3.json", &x3);
    assert_eq!(json_out(&["validate", &p3])["report"]["valid"], true);
    let od = json_out(&["obstruct-diff", "--scheme", &p3, "--eta", "1,0,0,0,0"]);
    assert!(od["criterion"].is_string());

    let wrong = ribbonlab(&["extend", "--scheme", &p2, "--ideal-class", "1,2,3"]);
    assert_eq!(wrong.status.code(), Some(2));
}

#[test]
fn extension_classes_of_trivial_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let x1 = write(dir.path(), "x1.json", &json_out(&["trivial", "--ldeg", "-3", "--n", "1"]));
    let x2 = write(dir.path(), "x2.json", &json_out(&["trivial", "--ldeg", "-3", "--n", "2"]));
    let d = write(dir.path(), "d.json", &json_out(&["pullback", "--scheme", &x1, "--degree", "0"]));
    let t = json_out(&["ext-classes", "--bundle", &d, "--scheme", &x2]);
    assert_eq!((t["torsor_dim"].as_u64(), t["quotient_dim"].as_u64()), (Some(2), Some(2)));
}

#[test]
fn double_classes() {
    let dir = tempfile::tempdir().unwrap();
    let zero = json_out(&["classify-double", "--ldeg", "-4"]);
    assert_eq!(zero["trivial"], true);
    let d = write(dir.path(), "d.json", &serde_json::json!({"values": {"01": [[-1, "1"]]}}));
    let v = json_out(&["classify-double", "--ldeg", "-4", "--d-cochain", &d]);
    assert_eq!(v["h1_dim"], 1);
    assert_eq!(v["trivial"], false);
}

#[test]
fn kunneth_and_profile_errors() {
    let dir = tempfile::tempdir().unwrap();
    let good = serde_json::json!({"C": {"genus": 0, "bundles": {"L": {"degree": -2}}}, "D": {"genus": 2}});
    let p = write(dir.path(), "p.json", &good);
    let v = json_out(&["kunneth", "--profiles", &p, "--lc", "L", "--ld", "K"]);
    assert_eq!((v["h0"].as_u64(), v["h1"].as_u64(), v["h2"].as_u64()), (Some(0), Some(2), Some(1)));

    let bad = serde_json::json!({"C": {"genus": 0, "bundles": {"L": {"degree": -2, "h0": 3}}}, "D": {"genus": 0}});
    let p = write(dir.path(), "bad.json", &bad);
    let out = ribbonlab(&["kunneth", "--profiles", &p, "--lc", "L", "--ld", "O"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "Profile");
}

#[test]
fn predicates_report() {
    let v = json_out(&["predicates", "--g", "5", "--degl", "-2", "--rank", "2"]);
    assert!(v["criterion"].is_string());
    assert!(v.get("moduli_fiber_rank").is_some());
}

#[test]
fn selftest_is_deterministic() {
    let a = ribbonlab(&["selftest", "--seed", "11", "--divisor", "20"]);
    let b = Command::new(env!("CARGO_BIN_EXE_ribbonlab"))
        .args(["selftest", "--divisor", "20"])
        .env("RIBBONLAB_SEED", "11")
        .output()
        .unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 11);
    assert_eq!(v["passed"], true);
}

#[test]
fn text_format() {
    let out = ribbonlab(&["--format", "text", "k3", "--eta1", "1", "--eta4", "-1", "--gc", "2", "--gd", "2"]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.lines().any(|l| l == "projective: true"));
}
