use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qredist")).args(args).output().expect("binary runs")
}

fn temp_file(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qredist-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_state(name: &str, body: &str) -> PathBuf {
    let path = temp_file(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn eval_json(path: &Path, extra: &[&str]) -> Value {
    let mut args = vec!["eval", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = run(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn make_cat_writes_two_terms() {
    let out = run(&["make", "cat", "--n", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with('|')).count(), 2);
    assert!(text.contains("roles: A B C R"));
}

#[test]
fn eval_keys_are_stable() {
    let path = write_state("product.qsv", "dims: 2 2 2 2\nroles: A B C R\n|0 0 0 0> = 1\n");
    let v = eval_json(&path, &[]);
    for key in ["entropies", "derived", "region", "corner", "dual", "merging"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    for (name, value) in v["derived"].as_object().unwrap() {
        assert!(value.as_f64().unwrap().abs() < 1e-12, "{name} = {value}");
    }
    let region = v["region"].as_array().unwrap();
    assert_eq!(region[0]["q_coeff"], 1.0);
    assert_eq!(region[0]["e_coeff"], 0.0);
    assert_eq!(region[1]["e_coeff"], 1.0);
}

#[test]
fn eval_reports_composability_when_d_present() {
    let path = write_state(
        "five.qsv",
        "dims: 2 2 2 2 2\nroles: A B C D R\n|0 0 0 0 0> = 1/sqrt(2)\n|1 0 1 1 1> = 1/sqrt(2)\n",
    );
    let v = eval_json(&path, &[]);
    assert!(v["composability"]["max_deviation"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn json_carries_full_precision() {
    let path = temp_file("w4.qsv");
    assert!(run(&["make", "w", "--n", "4", "--out", path.to_str().unwrap()]).status.success());
    let v = eval_json(&path, &[]);
    let q = v["corner"]["Q"].as_f64().unwrap();
    // for the W state Q = H(C|B) = 1 - h(1/4)
    let h = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
    assert!((q - (1.0 - h)).abs() < 1e-12, "{q} vs {}", 1.0 - h);
}

#[test]
fn text_and_csv_formats() {
    let path = temp_file("w4-text.qsv");
    assert!(run(&["make", "w", "--n", "4", "--out", path.to_str().unwrap()]).status.success());
    let text = run(&["--format", "text", "eval", path.to_str().unwrap()]);
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.contains("H(C) = 0.81128"));
    let csv = run(&["eval", path.to_str().unwrap(), "--format", "csv"]);
    let csv = String::from_utf8(csv.stdout).unwrap();
    assert!(csv.starts_with("section,key,value\n"));
    assert!(csv.contains("corner,\"Q\","));
}

#[test]
fn out_flag_writes_file() {
    let target = temp_file("sweep.csv");
    let out = run(&["decouple", "--dc", "4", "--dr", "2", "--d1", "1,4", "--trials", "5", "--out", target.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(&target).unwrap();
    assert!(csv.starts_with("d1,log2_d1,mean_distance,std_distance,half_ICR_bits\n"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn decouple_full_transmission_is_exact() {
    for input in ["max-entangled", "random"] {
        let out = run(&["decouple", "--dc", "16", "--dr", "2", "--d1", "16", "--trials", "20", "--input", input]);
        let csv = String::from_utf8(out.stdout).unwrap();
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert!(row[2].parse::<f64>().unwrap() <= 1e-9, "{input}: {}", row[2]);
    }
}

#[test]
fn decouple_rejects_bad_split() {
    let out = run(&["decouple", "--dc", "6", "--dr", "2", "--d1", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["decouple", "--dc", "8", "--dr", "2", "--d1", "4,2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seeds_control_randomness() {
    let a = run(&["verify", "duality", "--trials", "20", "--seed", "3"]);
    let b = run(&["verify", "duality", "--trials", "20", "--seed", "3"]);
    let c = run(&["verify", "duality", "--trials", "20", "--seed", "4"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let d = run(&["decouple", "--dc", "4", "--dr", "4", "--d1", "1,2,4", "--trials", "10", "--input", "random", "--seed", "1"]);
    let e = run(&["decouple", "--dc", "4", "--dr", "4", "--d1", "1,2,4", "--trials", "10", "--input", "random", "--seed", "1"]);
    assert_eq!(d.stdout, e.stdout);
}

#[test]
fn verify_exit_codes() {
    assert_eq!(run(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "ssa", "--trials", "10"]).status.code(), Some(0));
    // rounding noise in the identity checks exceeds a vanishing tolerance
    let out = run(&["verify", "duality", "--trials", "50", "--tol", "identity=1e-300"]);
    assert_eq!(out.status.code(), Some(5));
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["pass"], false);
    assert_eq!(run(&["verify", "ssa", "--trials", "10", "--tol", "inequality=-1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "ssa", "--trials", "10", "--tol", "bogus=1"]).status.code(), Some(2));
}

#[test]
fn dimension_cap_exit_code() {
    assert_eq!(run(&["make", "w", "--n", "13"]).status.code(), Some(3));
    let path = temp_file("cap.qsv");
    assert!(run(&["make", "cat", "--n", "4", "--out", path.to_str().unwrap()]).status.success());
    assert_eq!(run(&["--dim-cap", "8", "eval", path.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(run(&["--dim-cap", "3", "eval", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn parse_error_reports_position() {
    let path = write_state("bad.qsv", "dims: 2 2\nroles: C Q\n|0 0> = 1\n");
    let out = run(&["eval", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.qsv:2:"));
}

#[test]
fn missing_file_is_io_error() {
    assert_eq!(run(&["eval", "/nonexistent/x.qsv"]).status.code(), Some(1));
}

#[test]
fn hjpw_demo_saturates() {
    let path = temp_file("hjpw.qsv");
    assert!(run(&["make", "hjpw-demo", "--out", path.to_str().unwrap()]).status.success());
    let v = eval_json(&path, &[]);
    assert!(v["derived"]["I(C;R|B)"].as_f64().unwrap().abs() <= 1e-7);
    assert!(v["corner"]["Q"].as_f64().unwrap().abs() <= 5e-8);
}
