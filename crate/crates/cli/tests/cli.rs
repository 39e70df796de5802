//! End-to-end tests of the `carpetlab` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn carpetlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carpetlab"))
        .current_dir(dir)
        .env_remove("CARPETLAB_CACHE")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_json(dir: &Path, name: &str, v: &Value) {
    fs::write(dir.join(name), serde_json::to_string_pretty(v).unwrap()).unwrap();
}

fn entry(construction: &str, check: &str, expected: Value, mode: &str, tol: f64) -> Value {
    json!({
        "construction": construction,
        "check": check,
        "expected": expected,
        "mode": mode,
        "tolerance": tol,
        "paper_ref": "test entry",
        "provenance": "oracle",
        "samples": 12,
        "r_min": 0.125,
        "r_max": 0.5
    })
}

#[test]
fn empty_manifest_exits_zero_with_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    write_json(dir.path(), "m.json", &json!({"seed": 5, "entries": []}));
    let out = carpetlab(dir.path(), &["verify", "m.json", "--out", "r"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["rows"], json!([]));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    write_json(dir.path(), "unknown.json", &json!({"entries": [entry("Q(1,4)", "nonsense", json!(1), "ratio", 0.0)]}));
    assert_eq!(code(&carpetlab(dir.path(), &["verify", "unknown.json"])), 2);
    fs::write(dir.path().join("broken.json"), "{\"entries\": [").unwrap();
    assert_eq!(code(&carpetlab(dir.path(), &["verify", "broken.json"])), 2);
    assert_eq!(code(&carpetlab(dir.path(), &["verify", "missing.json"])), 2);
    assert_eq!(code(&carpetlab(dir.path(), &["frobnicate"])), 2);
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    write_json(
        dir.path(),
        "m.json",
        &json!({"seed": 1, "entries": [
            entry("Q(2)", "slits", json!(5), "absolute", 0.0),
            entry("Q(1)", "slits", json!(2), "absolute", 0.0)
        ]}),
    );
    let out = carpetlab(dir.path(), &["verify", "m.json", "--out", "r"]);
    assert_eq!(code(&out), 1);
    let csv = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| l.ends_with(",pass,")).count(), 1, "{csv}");
    assert_eq!(csv.lines().filter(|l| l.ends_with(",fail,")).count(), 1, "{csv}");
}

#[test]
fn output_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    write_json(
        dir.path(),
        "m.json",
        &json!({"seed": 42, "entries": [
            entry("Q(1,5)", "llc1", json!([null, 3.0]), "ratio", 0.0),
            entry("Q(1,5)", "allc", json!([null, 3.0]), "ratio", 0.0),
            entry("Q(1,5)", "ahlfors:2", json!(2.0), "ratio", 0.15),
            entry("Q(1,5)", "porosity:outer", json!([null, 4.0]), "ratio", 0.0),
            entry("circles(5;0.5,0.5,0.2)", "llc2", json!([null, 3.0]), "ratio", 0.0)
        ]}),
    );
    let a = carpetlab(dir.path(), &["--threads", "1", "verify", "m.json", "--out", "one"]);
    let b = carpetlab(dir.path(), &["--threads", "8", "verify", "m.json", "--out", "eight"]);
    assert_eq!(code(&a), code(&b));
    let one = fs::read(dir.path().join("one.csv")).unwrap();
    let eight = fs::read(dir.path().join("eight.csv")).unwrap();
    assert_eq!(one, eight);
    assert_eq!(String::from_utf8(one).unwrap().lines().count(), 6);
}

#[test]
fn report_merge_rules() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_json(d, "a.json", &json!({"seed": 1, "entries": [entry("Q(2)", "slits", json!(5), "absolute", 0.0)]}));
    write_json(d, "b.json", &json!({"seed": 2, "entries": [entry("Q(1)", "slits", json!(1), "absolute", 0.0)]}));
    assert_eq!(code(&carpetlab(d, &["verify", "a.json", "--out", "ra"])), 0);
    assert_eq!(code(&carpetlab(d, &["verify", "b.json", "--out", "rb"])), 0);

    // A single input passes through unchanged.
    assert_eq!(code(&carpetlab(d, &["report", "ra.json", "--out", "single.json"])), 0);
    assert_eq!(fs::read(d.join("ra.json")).unwrap(), fs::read(d.join("single.json")).unwrap());

    // Duplicates collapse; order of inputs does not matter.
    assert_eq!(code(&carpetlab(d, &["report", "ra.json", "rb.json", "ra.json", "--out", "m1.json"])), 0);
    assert_eq!(code(&carpetlab(d, &["report", "rb.json", "ra.json", "--out", "m2.json"])), 0);
    let m1 = fs::read(d.join("m1.json")).unwrap();
    assert_eq!(m1, fs::read(d.join("m2.json")).unwrap());
    let merged: Value = serde_json::from_slice(&m1).unwrap();
    assert_eq!(merged["rows"].as_array().unwrap().len(), 2);

    // Schema violations and conflicting duplicates are usage errors.
    write_json(d, "bad.json", &json!({"rows": [{"construction": "Q(1)"}]}));
    assert_eq!(code(&carpetlab(d, &["report", "ra.json", "bad.json", "--out", "x.json"])), 2);
    let mut conflict: Value = serde_json::from_slice(&fs::read(d.join("ra.json")).unwrap()).unwrap();
    conflict["rows"][0]["value"] = json!("4");
    write_json(d, "conflict.json", &conflict);
    assert_eq!(code(&carpetlab(d, &["report", "ra.json", "conflict.json", "--out", "x.json"])), 2);
}

#[test]
fn ahlfors_plot_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_json(d, "m.json", &json!({"seed": 3, "entries": [entry("Q(1,5)", "ahlfors:2", json!(2.0), "ratio", 0.2)]}));
    assert_eq!(code(&carpetlab(d, &["verify", "m.json", "--out", "r"])), 0);
    let out = carpetlab(d, &["--out-dir", "plots", "report", "r.json", "--out", "merged.json", "--plot-dir", "svg"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let svgs: Vec<_> = fs::read_dir(d.join("plots/svg")).unwrap().collect();
    assert_eq!(svgs.len(), 1);
    let svg = fs::read_to_string(svgs[0].as_ref().unwrap().path()).unwrap();
    assert!(svg.contains("slope = "));
}

#[test]
fn generate_analyze_boundary_glue() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&carpetlab(d, &["generate", "--family", "Q", "--gen", "1", "--res", "5", "--out", "q1.json"])), 0);
    let out = carpetlab(
        d,
        &["--seed", "9", "analyze", "--in", "q1.json", "--checks", "slits,llc1,components", "--samples", "8", "--out", "a.csv", "--expect"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(d.join("a.csv")).unwrap();
    assert!(csv.starts_with("construction,check,seed,value"));
    assert_eq!(csv.lines().count(), 4);
    assert_eq!(code(&carpetlab(d, &["analyze", "--in", "q1.json", "--checks", "llc9", "--out", "b.csv"])), 2);

    let out = carpetlab(d, &["boundary", "--in", "q1.json", "--ends", "--rank", "--circles", "--out", "b.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let b: Value = serde_json::from_str(&fs::read_to_string(d.join("b.json")).unwrap()).unwrap();
    assert_eq!(b["components"]["components"].as_array().unwrap().len(), 2);
    assert_eq!(b["ends"]["stabilized"], json!(2));
    assert_eq!(b["rank"], json!(0));
    assert!(b["circles"].as_array().unwrap().iter().all(|c| c["pass"] == json!(true)));

    // Glue a second unit square along the bottom edge by the identity.
    assert_eq!(code(&carpetlab(d, &["generate", "--family", "Q", "--gen", "0", "--res", "3", "--out", "sq.json"])), 0);
    let mesh: Value = serde_json::from_str(&fs::read_to_string(d.join("sq.json")).unwrap()).unwrap();
    let bottom: Vec<u64> = mesh["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|v| v["y"].as_f64() == Some(0.0))
        .map(|v| v["id"].as_u64().unwrap())
        .collect();
    assert_eq!(bottom.len(), 9);
    let pairs: Vec<[u64; 2]> = bottom.iter().map(|&i| [i, i]).collect();
    write_json(d, "map.json", &json!({"pairs": pairs, "lipschitz": 1.0}));
    let out = carpetlab(d, &["glue", "--base", "sq.json", "--patch", "sq.json:map.json", "--out", "glued.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["vertices"], json!(162));

    let out = carpetlab(d, &["glue", "--base", "q1.json", "--fill-slits", "--out", "filled.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(d.join("filled.json").exists());
}

#[test]
fn mesh_cache_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_carpetlab"))
            .current_dir(d)
            .env("CARPETLAB_CACHE", d.join("cache"))
            .args(["generate", "--family", "circles", "--res", "4", "--out", "c.json"])
            .output()
            .unwrap()
    };
    assert_eq!(code(&run()), 0);
    assert_eq!(fs::read_dir(d.join("cache")).unwrap().count(), 1);
    let first = fs::read(d.join("c.json")).unwrap();
    assert_eq!(code(&run()), 0);
    assert_eq!(first, fs::read(d.join("c.json")).unwrap());
}
