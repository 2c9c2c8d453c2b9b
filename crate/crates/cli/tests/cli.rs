use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ekeland::codespec::CodeFile;
use ekeland::critical::Certificate;
use ekeland::rational::{frac, int, parse_q, pow2, Q};
use ekeland::space::Point;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ekeland"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

const IDENTITY: &str = r#"{"schema_version":1,"code":{"kind":"piecewise-linear","knots":[["0","0"],["1","1"]]}}"#;
const STEP: &str = r#"{"schema_version":1,"code":{"kind":"piecewise-lsc","knots":["0","1/2","1"],"knot_values":["1","0","0"],"cells":[["1","1"],["0","0"]]}}"#;

fn cert(dir: &Path, name: &str) -> Certificate {
    serde_json::from_str(&fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn search_then_verify_identity() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "id.json", IDENTITY);
    let out = run(d.path(), &["search", "--code", "id.json", "--epsilon", "1/2", "-o", "c.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let c = cert(d.path(), "c.json");
    assert!(c.x_star.as_real().unwrap() <= &pow2(-8));
    let out = run(d.path(), &["verify", "--code", "id.json", "--cert", "c.json"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn tampered_certificate_exits_four_with_witness() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "id.json", IDENTITY);
    run(d.path(), &["search", "--code", "id.json", "--epsilon", "1/2", "-o", "c.json"]);
    let mut c = cert(d.path(), "c.json");
    c.x_star = Point::real(int(1));
    write(d.path(), "bad.json", &c.to_json());
    let out = run(d.path(), &["verify", "--code", "id.json", "--cert", "bad.json", "-o", "fresh.json"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stdout).contains("witness y = 0"));
    assert_eq!(cert(d.path(), "fresh.json").witness, Some(Point::real(int(0))));
}

#[test]
fn aca_sup_gadget_file() {
    let d = tempfile::tempdir().unwrap();
    let out = run(d.path(), &["gadget", "--type", "aca-sup", "--cn", "1/2-2^-(n+1)", "--prefix", "16", "-o", "sup.json"]);
    assert_eq!(out.status.code(), Some(0));
    let file = CodeFile::parse(&fs::read_to_string(d.path().join("sup.json")).unwrap()).unwrap();
    let code = file.code.build().unwrap();
    assert_eq!(code.lsc().upper(&Point::real(frac(1, 4))), Some(int(2)));
}

#[test]
fn wkl_unit_gadget_has_endpoint_value_three() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "t1.json", r#"{"nodes": ["0", "1", "01"], "depth": 3}"#);
    let out = run(d.path(), &["gadget", "--type", "wkl", "--tree", "t1.json", "--target", "unit", "-o", "w.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let code = CodeFile::parse(&fs::read_to_string(d.path().join("w.json")).unwrap()).unwrap().code.build().unwrap();
    let lsc = code.lsc();
    assert_eq!(lsc.upper(&Point::real(int(0))), Some(int(3)));
    assert_eq!(lsc.upper(&Point::real(int(1))), Some(int(3)));
}

#[test]
fn malformed_tree_leaves_no_output() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "bad.json", "{\"nodes\": [\"0\",\n  \"1\"\n");
    let out = run(d.path(), &["gadget", "--type", "wkl", "--tree", "bad.json", "-o", "w.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
    assert!(!d.path().join("w.json").exists());
    write(d.path(), "deep.json", r#"{"nodes": ["000"], "depth": 3}"#);
    let out = run(d.path(), &["gadget", "--type", "wkl", "--tree", "deep.json", "-o", "w.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!d.path().join("w.json").exists());
    let entries: Vec<_> = fs::read_dir(d.path()).unwrap().collect();
    assert_eq!(entries.len(), 2);
}

#[test]
fn step_envelope_csv() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "step.json", STEP);
    let out = run(d.path(), &["envelope", "--code", "step.json", "--alpha", "1", "--resolution", "8", "-o", "e.csv"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(d.path().join("e.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[0][0], "0");
    let (lo, hi) = (parse_q(rows[0][1]).unwrap(), parse_q(rows[0][2]).unwrap());
    assert!(lo <= frac(1, 2) && frac(1, 2) <= hi);
    assert_eq!(&rows[0][3..], &["1", "8"]);
}

#[test]
fn embed_writes_breakpoints() {
    let d = tempfile::tempdir().unwrap();
    let out = run(d.path(), &["embed", "--kind", "unit", "--x", "1/3", "--y", "1/2", "-o", "u.json"]);
    assert_eq!(out.status.code(), Some(0));
    let p: Point = serde_json::from_str(&fs::read_to_string(d.path().join("u.json")).unwrap()).unwrap();
    let h = p.as_pl().unwrap();
    assert_eq!(h.eval(&int(0)), frac(1, 2));
    assert_eq!(h.eval(&int(1)), frac(1, 3));
    let out = run(d.path(), &["embed", "--kind", "baire", "--x", "[1,2]", "--depth", "4", "-o", "b.json"]);
    assert_eq!(out.status.code(), Some(0));
    let p: Point = serde_json::from_str(&fs::read_to_string(d.path().join("b.json")).unwrap()).unwrap();
    assert_eq!(ekeland::gadgets::decode_baire(p.as_pl().unwrap(), 4), Some(vec![1, 2, 0, 0]));
}

#[test]
fn invalid_inputs_exit_two() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "id.json", IDENTITY);
    let out = run(d.path(), &["search", "--code", "id.json", "--epsilon", "0", "-o", "c.json"]);
    assert_eq!(out.status.code(), Some(2));
    write(d.path(), "v2.json", &IDENTITY.replace("\"schema_version\":1", "\"schema_version\":2"));
    let out = run(d.path(), &["search", "--code", "v2.json", "--epsilon", "1", "-o", "c.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(d.path(), &["search", "--code", "id.json", "--epsilon", "1", "--principle", "lvp", "-o", "c.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!d.path().join("c.json").exists());
}

#[test]
fn exhausted_iterations_exit_three() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "down.json", r#"{"schema_version":1,"code":{"kind":"piecewise-linear","knots":[["0","1"],["1","0"]]}}"#);
    let out = run(d.path(), &["search", "--code", "down.json", "--epsilon", "1/2", "--max-iters", "1", "-o", "c.json"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(d.path().join("c.json").exists());
    let out = run(d.path(), &["search", "--code", "down.json", "--epsilon", "1/2", "-o", "c.json"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn lvp_search_records_localization() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "id.json", IDENTITY);
    let out = run(d.path(), &["search", "--code", "id.json", "--epsilon", "1/2", "--principle", "lvp", "--x0", "1", "--resolution", "7", "-o", "c.json"]);
    assert_eq!(out.status.code(), Some(0));
    let c = cert(d.path(), "c.json");
    assert!(c.localization.unwrap().holds);
    let out = run(d.path(), &["verify", "--code", "id.json", "--cert", "c.json"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn manifest_records_digests_and_reruns_identically() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "id.json", IDENTITY);
    let args = ["search", "--code", "id.json", "--epsilon", "1/2", "-o", "c.json", "--manifest", "m.json"];
    run(d.path(), &args);
    let first = fs::read(d.path().join("m.json")).unwrap();
    let c1 = fs::read(d.path().join("c.json")).unwrap();
    run(d.path(), &args);
    assert_eq!(fs::read(d.path().join("m.json")).unwrap(), first);
    assert_eq!(fs::read(d.path().join("c.json")).unwrap(), c1);
    let m: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(m["command"], "search");
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["inputs"][0]["path"], "id.json");
    assert_eq!(m["outputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn seeded_order_keeps_the_verdict() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "id.json", IDENTITY);
    for seed in ["1", "2", "3"] {
        let out = run(d.path(), &["--seed-order", seed, "search", "--code", "id.json", "--epsilon", "1/2", "-o", "c.json"]);
        assert_eq!(out.status.code(), Some(0));
        let x: &Q = &cert(d.path(), "c.json").x_star.as_real().unwrap().clone();
        assert!(x <= &pow2(-8));
    }
}
