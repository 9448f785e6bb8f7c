use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ptolemaic"));
    for var in ["KAPPA", "SEED", "WORKERS", "THRESHOLD", "TOLERANCE", "OUT", "FORMAT"] {
        c.env_remove(format!("PTOLEMAIC_{var}"));
    }
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad report ({e}): {}\nstderr: {}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn strip_fails_apt_threshold() {
    let out = run(&["certify", "apt", "--kappa", "-1", "--gen", "strip:a=1,t=10"]);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    let d = r["results"]["apt"]["exp_defect"].as_f64().unwrap();
    assert!((d - 7.4).abs() < 0.1);
    assert_eq!(r["verdicts"][0]["threshold"], 4.0);
    assert_eq!(r["pass"], false);
    assert_eq!(r["schema_version"], 1);
}

#[test]
fn euclidean_ptolemy_passes() {
    let out = run(&["certify", "ptolemy", "--gen", "euclidean:dim=2,n=20", "--seed", "7"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert!(r["results"]["ptolemy"]["defect"].as_f64().unwrap() <= 1e-9);
    assert_eq!(r["inputs"][0]["points"], 20);
}

#[test]
fn cone_build_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cone.json");
    let out = run(&["cone", "build", "--gen", "line:n=3", "--heights", "geometric:8", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let cone: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(cone["points"].as_array().unwrap().len(), 24);
    assert_eq!(cone["o"], serde_json::json!([0, 1.0]));
    assert!(cone["base_space"]["matrix"].is_array());
}

#[test]
fn csv_with_omega_is_read() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    fs::write(&path, "0,1,2,inf\n1,0,1,inf\n2,1,0,inf\ninf,inf,inf,0\n").unwrap();
    let out = run(&["validate", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["inputs"][0]["omega"], 3);
    assert_eq!(r["results"]["validation"]["ok"], true);
}

#[test]
fn asymmetric_input_is_rejected_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "0,1,1,1\n2,0,1,1\n1,1,0,1\n1,1,1,0\n").unwrap();
    let out = run(&["certify", "ptolemy", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Symmetry at [0, 1]"), "{err}");

    let out = run(&["validate", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert_eq!(report(&out)["results"]["validation"]["violations"][0]["witness"], serde_json::json!([0, 1]));
}

#[test]
fn hyperboloid_generator() {
    let out = run(&["certify", "ptk", "--kappa", "-1", "--gen", "hyperboloid:kappa=-1,n=15,radius=2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["inputs"][0]["points"], 15);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&run(&["certify", "apt", "--kappa", "0", "--gen", "line:n=5"])), 2);
    assert_eq!(code(&run(&["certify", "ascat", "--kappa", "1", "--gen", "line:n=5"])), 2);
    assert_eq!(code(&run(&["certify", "ptolemy", "--input", "/nonexistent/x.csv"])), 2);
    assert_eq!(code(&run(&["certify", "ptolemy"])), 2);
    assert_eq!(code(&run(&["certify", "ptolemy", "--gen", "nosuch:n=4"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["certify", "ptolemy", "--gen", "line:n=5", "--workers", "0"])), 2);
}

fn without_timings(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn reports_do_not_depend_on_workers() {
    for cmd in [
        vec!["certify", "apt", "--gen", "euclidean:dim=2,n=14,seed=3"],
        vec!["certify", "gromov", "--gen", "random_metric:n=12,seed=9"],
        vec!["certify", "ascat", "--kappa", "-2", "--gen", "hyperboloid:kappa=-1,n=10"],
    ] {
        let one = run(&[cmd.as_slice(), &["--workers", "1"]].concat());
        let eight = run(&[cmd.as_slice(), &["--workers", "8"]].concat());
        assert_eq!(code(&one), code(&eight));
        assert_eq!(without_timings(report(&one)), without_timings(report(&eight)));
        assert_eq!(report(&eight)["timings"]["workers"], 8);
    }
}

#[test]
fn env_overrides_apply_below_flags() {
    let out = bin()
        .args(["certify", "ptolemy", "--gen", "euclidean:n=6"])
        .env("PTOLEMAIC_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(report(&out)["config"]["seed"], 11);
    let out = bin()
        .args(["certify", "ptolemy", "--gen", "euclidean:n=6", "--seed", "5"])
        .env("PTOLEMAIC_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(report(&out)["config"]["seed"], 5);
    // A seed inside the spec beats both.
    let a = report(&run(&["certify", "ptolemy", "--gen", "euclidean:n=6,seed=2", "--seed", "5"]));
    let b = report(&run(&["certify", "ptolemy", "--gen", "euclidean:n=6,seed=2"]));
    assert_eq!(a["inputs"][0]["digest"], b["inputs"][0]["digest"]);
}

#[test]
fn threshold_override() {
    let out = run(&["certify", "apt", "--gen", "strip:a=1,t=10", "--threshold", "8"]);
    assert_eq!(code(&out), 0);
    let out = run(&["certify", "ptolemy", "--gen", "graph:edges=0-1;1-2;2-3;3-0", "--threshold", "0.4"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn moebius_commands() {
    let out = run(&["moebius", "crt", "--gen", "line:n=4", "--quad", "0,1,2,3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["results"]["crt"], serde_json::json!([0.25, 1.0, 0.75]));

    let out = run(&["moebius", "equivalent", "--gen", "euclidean:n=7,seed=1", "--with-gen", "euclidean:n=7,seed=1"]);
    assert_eq!(code(&out), 0);
    let out = run(&["moebius", "equivalent", "--gen", "euclidean:n=7,seed=1", "--with-gen", "euclidean:n=7,seed=2"]);
    assert_eq!(code(&out), 1);

    let out = run(&["moebius", "homothety", "--gen", "line:n=5", "--with-gen", "line:n=5"]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["results"]["homothety"]["lambda"], 1.0);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inv.json");
    let out = run(&["moebius", "involute", "--gen", "graph:edges=0-1;1-2;2-3;3-0", "--at", "0", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    assert_eq!(r["results"]["validation"]["violations"][0]["kind"], "triangle");
    let inv: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(inv["omega"], 0);

    let out = run(&["moebius", "involute", "--gen", "euclidean:n=6", "--at", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let back = run(&["validate", "--input", path.to_str().unwrap()]);
    assert_eq!(report(&back)["inputs"][0]["omega"], 2);
}

#[test]
fn cone_boundary_and_busemann() {
    let out = run(&["cone", "boundary", "--gen", "euclidean:n=10,seed=4"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert!(r["results"]["recovery_error"].as_f64().unwrap() <= 1e-12);
    assert_eq!(r["results"]["boundary"]["approximants"].as_array().unwrap().len(), 9);

    let out = run(&["cone", "busemann", "--gen", "euclidean:n=5", "--point", "0", "--height", "0.25"]);
    assert_eq!(code(&out), 0);
    let v = report(&out)["results"]["busemann"]["value"].as_f64().unwrap();
    assert!((v - 4f64.ln()).abs() < 1e-12);
    assert_eq!(code(&run(&["cone", "busemann", "--gen", "line:n=3", "--point", "0", "--height", "1", "--i-max", "1"])), 2);
}

#[test]
fn gen_roundtrips_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let out = run(&["gen", "random_metric:n=6,seed=4", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let csv_report = run(&["certify", "gromov", "--input", path.to_str().unwrap()]);
    let gen_report = run(&["certify", "gromov", "--gen", "random_metric:n=6,seed=4"]);
    assert_eq!(report(&csv_report)["results"], report(&gen_report)["results"]);
}

#[test]
fn csv_report_format() {
    let out = run(&["certify", "ptolemy", "--gen", "line:n=5", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("name,value,threshold,pass\nptolemy_defect,"));
}
