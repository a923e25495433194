use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bestapprox"));
    c.env_remove("BESTAPPROX_PRECISION_BITS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn doc(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bestapprox-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn sqrt2_sup_sequence() {
    let out = run(&["bsa", "--target", "quad:(0+1*sqrt(2))/1", "--norm", "sup", "--up-to-p", "500"]);
    assert_eq!(out.status.code(), Some(0));
    let d = doc(&out);
    let ps: Vec<u64> = d["result"]["sequence"]["entries"].as_array().unwrap().iter().map(|e| e["p"].as_u64().unwrap()).collect();
    assert_eq!(ps, [1, 2, 5, 12, 29, 70, 169, 408]);
    assert_eq!(d["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(d["config"]["command"], "bsa");
    assert_eq!(d["config"]["params"]["up_to_p"], 500);
}

#[test]
fn rational_linear_form_target_exits_2() {
    let out = run(&["ba-lf", "--target", "rat:1/2", "--up-to-M", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let d = doc(&out);
    assert_eq!(d["result"]["error"]["kind"], "RationalDependence");
    assert_eq!(d["result"]["error"]["witness"], serde_json::json!(["-1", "2"]));
}

#[test]
fn malformed_input_exits_1() {
    assert_eq!(run(&["bsa", "--target", "sqrt2", "--up-to-p", "5"]).status.code(), Some(1));
    assert_eq!(run(&["bsa", "--target", "rat:1/3", "--norm", "l7", "--up-to-p", "5"]).status.code(), Some(1));
    assert_eq!(run(&["bsa", "--up-to-p", "5"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn precision_exhaustion_exits_3() {
    // a stream that stops refining cannot separate the records
    let path = scratch("coarse.txt");
    std::fs::write(&path, "0.4 0.5\n0.41 0.42\n").unwrap();
    let target = format!("stream:{}", path.display());
    let out = run(&["bsa", "--target", &target, "--up-to-p", "100"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn precision_default_comes_from_the_environment() {
    let out = bin().env("BESTAPPROX_PRECISION_BITS", "100").args(["bsa", "--target", "rat:1/3", "--up-to-p", "5"]).output().unwrap();
    assert_eq!(doc(&out)["config"]["precision_bits"], 100);
    let out = bin().env("BESTAPPROX_PRECISION_BITS", "lots").args(["bsa", "--target", "rat:1/3", "--up-to-p", "5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let cases: [&[&str]; 4] = [
        &["analyze", "--target", "rat:3/7,rat:5/11", "--norm", "poly:fstar", "--up-to-p", "77"],
        &["report", "--target", "quad:(1+1*sqrt(5))/2", "--up-to-p", "300", "--up-to-M", "50"],
        &["lift", "--samples", "2", "--horizon", "300", "--seed", "9"],
        &["singular", "--depth", "2"],
    ];
    for args in cases {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let a = run(&["lift", "--samples", "2", "--horizon", "300", "--seed", "9"]);
    let c = run(&["lift", "--samples", "2", "--horizon", "300", "--seed", "10"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn files_are_written() {
    let (json, csv, svg) = (scratch("a.json"), scratch("a.csv"), scratch("a.svg"));
    let out = run(&[
        "analyze", "--target", "rat:3/7,rat:5/11", "--norm", "poly:fstar", "--up-to-p", "77",
        "--out", json.to_str().unwrap(), "--csv", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let d: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(d["result"]["analysis"]["kind"], "analysis");
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("nu,p,a1,a2,D_lo,D_hi\n"));
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    // three-dimensional targets have no scatter
    let out = run(&["bsa", "--target", "rat:1/3,rat:1/5,rat:1/7", "--up-to-p", "20", "--out", json.to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn singular_certificate_checks_out() {
    let d = doc(&run(&["singular", "--r", "2", "--psi", "power:3", "--depth", "3"]));
    let r = &d["result"];
    assert_eq!(r["validation"]["valid"], true);
    assert!(r["singularity"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    assert!(r["determinant_witnesses"].as_array().unwrap().iter().all(|w| w["nonzero"] == true && w["in_band"] == true));
}

#[test]
fn steering_trace_has_requested_length() {
    let out = run(&["steer", "--count", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(doc(&out)["result"]["steps"].as_array().unwrap().len(), 3);
    // the sup sphere has no illuminating pair in one orthant
    assert_eq!(run(&["steer", "--norm", "sup", "--targets", "1,1/2;1,1/3", "--count", "2"]).status.code(), Some(2));
}

#[test]
fn fstar_demo_has_constant_signatures() {
    let out = run(&["demo-fstar", "--count", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = &doc(&out)["result"];
    let sigs = r["signatures"].as_array().unwrap();
    assert!(sigs[..10].iter().all(|s| s == "(+,+)"));
    assert_eq!(r["verification"]["pass"], true);
    assert_eq!(r["sup_constant"], false);
}
