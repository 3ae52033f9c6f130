use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orliczkit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn first_order_target_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a3.yf1");
    let out = run(&["target", "first", "--young", "power:2", "--n", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let t = orliczkit::young::read_yf1(&text).unwrap();
    assert!((t.tail_exponent() / 6.0 - 1.0).abs() < 0.01);
    // the file is accepted back as --young
    let out = run(&["boyd", "index", "--young", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json(&out)["index"].as_f64().unwrap() / 6.0 - 1.0).abs() < 0.05);
}

#[test]
fn density_of_cube() {
    let out = run(&["domain", "density", "--gen", "cube", "--n", "2", "--h", "0.00390625"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["inf"].as_f64().unwrap() / (PI / 4.0) - 1.0).abs() < 0.05);
    assert_eq!(v["seed"], 0);
}

#[test]
fn boyd_index_of_square() {
    let v = json(&run(&["boyd", "index", "--young", "power:2"]));
    assert!((v["index"].as_f64().unwrap() - 2.0).abs() < 0.04);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["young", "show"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    // s³ fails condition (iii) at α = 1/2
    assert_eq!(run(&["boyd", "check", "--young", "power:3", "--alpha", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["boyd", "check", "--young", "power:2", "--alpha", "0.3"]).status.code(), Some(0));
    let cusp = run(&["domain", "density", "--gen", "inward-cusp", "--n", "2", "--h", "0.00390625"]);
    assert_eq!(cusp.status.code(), Some(2));
}

#[test]
fn raster_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ball.ord1");
    let p = path.to_str().unwrap();
    assert!(run(&["domain", "gen", "--gen", "ball:1", "--n", "2", "--h", "0.015625", "--out", p]).status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("ORD1 2 0.015625"));
    let v = json(&run(&["domain", "halve", "--domain", p, "--x=0.013,-0.021", "--r", "0.5"]));
    let (a, b) = (v["cells_r"].as_f64().unwrap(), v["cells_tilde"].as_f64().unwrap());
    assert!((b / a - 0.5).abs() <= 2.0 / a);
}

#[test]
fn norms_and_lemma() {
    let v = json(&run(&["norm", "lux", "--young", "power:2", "--gen", "cube", "--n", "2", "--h", "0.03125", "--field", "const:3"]));
    assert!((v["norm"].as_f64().unwrap() - 3.0).abs() < 1e-5);
    let v = json(&run(&[
        "norm", "sobolev", "--young", "power:2", "--gen", "cube", "--n", "2", "--h", "0.03125", "--field", "coord:0",
    ]));
    assert_eq!(v["terms"].as_array().unwrap().len(), 3);
    let out = run(&["verify", "ratio-lemma", "--young", "power:2", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["pass"], true);
}

#[test]
fn conjugate_and_inverse() {
    let out = run(&["young", "conjugate", "--young", "power:2"]);
    assert!(out.status.success());
    let c = orliczkit::young::read_yf1(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!((c.tail_exponent() - 2.0).abs() < 0.01);
    let v = json(&run(&["young", "invert", "--young", "power:2", "--y", "4"]));
    assert!((v["value"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn harness_csv_and_workers_env() {
    let args = [
        "harness", "run", "--young", "power:1.5", "--n", "2", "--gen", "cube", "--h", "0.015625", "--centers", "2",
        "--radii", "0.5", "--family-centers", "2", "--format", "csv",
    ];
    let a = bin().args(args).env("ORLICZKIT_WORKERS", "1").output().unwrap();
    let b = bin().args(args).arg("--workers").arg("3").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    let text = String::from_utf8(a.stdout.clone()).unwrap();
    assert!(text.starts_with("run,center,R,step,"));
    assert!(text.lines().count() > 4);
    assert_eq!(a.stdout, b.stdout);
}
