//! End-to-end runs of the `strategic` binary.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const GOLDEN: &str = "quad:(-1+1*sqrt(5))/2";

fn strategic(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strategic"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("STRATEGIC_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn snapshot_of(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}

#[test]
fn simulate_then_reconstruct_round_trip() {
    let dir = TempDir::new().unwrap();
    let out = dir.path();
    let sim = strategic(&["simulate", "--gap", GOLDEN, "--modes", "64", "--seed", "3"], out);
    assert_eq!(code(&sim), 0, "{}", String::from_utf8_lossy(&sim.stderr));
    for f in ["initial_y0.json", "initial_y1.json", "snapshot_0.json", "snapshot_1.json", "simulate.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let snap = json(&out.join("snapshot_0.json"));
    assert_eq!(snap["header"]["format_version"], 1);
    assert_eq!(snap["header"]["config"]["seed"], 3);

    let y0 = out.join("initial_y0.json");
    let y1 = out.join("initial_y1.json");
    let truth = format!("{},{}", y0.display(), y1.display());
    let rec = strategic(&["reconstruct", "--truth", &truth], out);
    assert_eq!(code(&rec), 0, "{}", String::from_utf8_lossy(&rec.stderr));
    let doc = json(&out.join("reconstruction.json"));
    let err = doc["reconstruction"]["relative_error"].as_f64().unwrap();
    assert!(err < 1e-12, "relative error {err}");
    assert_eq!(doc["reconstruction"]["modes_total"], 64);

    let csv = fs::read_to_string(out.join("reconstruction.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# {"));
    assert_eq!(lines.next().unwrap(), "k,abs_det,cond,err_a,err_b");
    assert_eq!(lines.count(), 64);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let out = dir.path();
    let args = ["simulate", "--system", "beam", "--gap", GOLDEN, "--modes", "16", "--seed", "9"];
    assert_eq!(code(&strategic(&args, out)), 0);
    let first = snapshot_of(out);
    assert_eq!(code(&strategic(&args, out)), 0);
    assert_eq!(first, snapshot_of(out));

    let scan = ["scan", "--kind", "noise", "--gap", GOLDEN, "--modes", "32", "--trials", "4", "--seed", "5"];
    assert_eq!(code(&strategic(&scan, out)), 0);
    let a = fs::read(out.join("scan_noise.json")).unwrap();
    assert_eq!(code(&strategic(&scan, out)), 0);
    assert_eq!(a, fs::read(out.join("scan_noise.json")).unwrap());
}

#[test]
fn plate_layout_round_trip() {
    let dir = TempDir::new().unwrap();
    let out = dir.path();
    let sim = strategic(
        &["simulate", "--system", "plate", "--plate-a", "1", "--plate-b", "quad:(0+1*sqrt(2))/1", "--gap", GOLDEN, "--modes", "4x4", "--seed", "1"],
        out,
    );
    assert_eq!(code(&sim), 0, "{}", String::from_utf8_lossy(&sim.stderr));
    let snap = json(&out.join("snapshot_0.json"));
    assert_eq!(snap["header"]["config"]["system"], "plate");
    let rec = strategic(&["reconstruct"], out);
    assert_eq!(code(&rec), 0, "{}", String::from_utf8_lossy(&rec.stderr));
    let csv = fs::read_to_string(out.join("reconstruction.csv")).unwrap();
    let labels: Vec<&str> = csv.lines().skip(2).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(labels.len(), 16);
    assert_eq!(labels[0], "1:1");
    assert_eq!(labels[15], "4:4");
}

#[test]
fn certify_golden_rational_and_beam() {
    let dir = TempDir::new().unwrap();
    let out = dir.path();

    let o = strategic(&["certify", "--gap", GOLDEN, "--kmax", "1000"], out);
    assert_eq!(code(&o), 0);
    let cert = json(&out.join("certificate.json"));
    assert_eq!(cert["certificate"]["verdict"], "certified-all-k");
    let floor = cert["certificate"]["observed_floor"].as_f64().unwrap();
    assert!((floor - 0.381_966_011_250_105_15).abs() < 1e-12);
    let csv = fs::read_to_string(out.join("certify.csv")).unwrap();
    assert_eq!(csv.lines().nth(1), Some("k,distance,scaled_floor"));
    assert_eq!(csv.lines().count(), 1002);

    let o = strategic(&["certify", "--gap", "rat:1/3", "--kmax", "20"], out);
    assert_eq!(code(&o), 0);
    let cert = json(&out.join("certificate.json"));
    assert_eq!(cert["certificate"]["verdict"], "refuted");
    assert_eq!(cert["certificate"]["argmin"], 3);

    let o = strategic(&["certify", "--system", "beam", "--gap", GOLDEN, "--kmax", "500"], out);
    assert_eq!(code(&o), 0);
    let cert = json(&out.join("certificate.json"));
    assert_eq!(cert["certificate"]["verdict"], "certified-all-k");
    assert!(cert["certificate"]["observed_lower_bound"].as_f64().unwrap() >= 1.0 / 3.0);
}

#[test]
fn construct_direct_and_reduced() {
    let dir = TempDir::new().unwrap();
    let out = dir.path();
    let o = strategic(&["construct", "--q", "5", "--tau", "1", "--delta", "0.01"], out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = json(&out.join("construction.json"));
    let text = doc.to_string();
    assert!(text.contains("889/2816"), "{text}");

    let o = strategic(&["construct", "--q", "7/2", "--tau", "2", "--delta", "0.1"], out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = json(&out.join("construction.json")).to_string();
    assert!(text.contains("\"14\""), "{text}");

    let o = strategic(&["construct", "--q", "5", "--tau", "1", "--delta", "0"], out);
    assert_eq!(code(&o), 2);
    let o = strategic(&["construct", "--q", "0", "--tau", "1", "--delta", "0.1"], out);
    assert_eq!(code(&o), 2);
}

#[test]
fn validation_io_and_singular_exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path();
    assert_eq!(code(&strategic(&["certify", "--gap", "quad:(1+1*sqrt(-5))/2"], out)), 2);
    assert_eq!(code(&strategic(&["certify", "--gap", GOLDEN, "--orders", "0,1"], out)), 2);

    // gap π/3: modes 3 and 6 cannot be recovered
    let sim = strategic(&["simulate", "--gap", "rat:1/3", "--modes", "6"], out);
    assert_eq!(code(&sim), 0);
    let rec = strategic(&["reconstruct"], out);
    assert_eq!(code(&rec), 3, "{}", String::from_utf8_lossy(&rec.stdout));
    let doc = json(&out.join("reconstruction.json"));
    assert_eq!(doc["reconstruction"]["singular_modes"], serde_json::json!([3, 6]));

    fs::write(out.join("snapshot_1.json"), "{ not json").unwrap();
    assert_eq!(code(&strategic(&["reconstruct"], out)), 4);
    let missing = out.join("absent.json");
    let input = format!("{},{}", out.join("snapshot_0.json").display(), missing.display());
    assert_eq!(code(&strategic(&["reconstruct", "--input", &input], out)), 4);
}

#[test]
fn output_directory_from_environment() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("from-env");
    let o = Command::new(env!("CARGO_BIN_EXE_strategic"))
        .args(["certify", "--gap", GOLDEN, "--kmax", "50"])
        .env("STRATEGIC_OUT_DIR", &target)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(target.join("certificate.json").exists());
    assert!(!dir.path().join("strategic-out").exists());
}

#[test]
fn scans_write_documents() {
    let dir = TempDir::new().unwrap();
    let out = dir.path();
    for (kind, file) in [
        ("floor", "scan_floor.json"),
        ("multi-time", "scan_multi_time.json"),
        ("sensitivity", "scan_sensitivity.json"),
        ("shift", "scan_shift.json"),
    ] {
        let mut args = vec!["scan", "--kind", kind, "--gap", GOLDEN, "--kmax", "200", "--modes", "8", "--nmax", "4"];
        if kind == "multi-time" {
            args.extend(["--times", "0,1/2,quad:(1+1*sqrt(5))/2"]);
        }
        let o = strategic(&args, out);
        assert_eq!(code(&o), 0, "{kind}: {}", String::from_utf8_lossy(&o.stderr));
        let doc = json(&out.join(file));
        assert_eq!(doc["header"]["tool"], "strategic-pairs");
        assert_eq!(doc["header"]["config"]["scan"], kind);
    }
}
