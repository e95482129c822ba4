use std::path::Path;
use std::process::{Command, Output};

use qcorr::campaign::parse_params;
use qcorr::states::{delta_family, werner};
use qcorr::{io, DensityMatrix};

fn qcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcorr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_state(dir: &Path, name: &str, rho: &DensityMatrix) -> String {
    let path = dir.join(name);
    io::write_state(&path, rho).unwrap();
    path.to_str().unwrap().to_string()
}

fn report_json(path: &str) -> serde_json::Value {
    let out = qcorr(&["report", "--json", path]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn report_bell_and_maximally_mixed() {
    let dir = tempfile::tempdir().unwrap();
    let bell = report_json(&write_state(dir.path(), "bell.json", &werner(1.0).unwrap()));
    assert!(bell["S"].as_f64().unwrap().abs() < 1e-9);
    for k in ["D_left", "M", "A"] {
        assert!((bell[k].as_f64().unwrap() - 1.0).abs() < 1e-9, "{k}");
    }
    let mixed = report_json(&write_state(dir.path(), "mixed.json", &DensityMatrix::maximally_mixed()));
    assert!((mixed["S"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    for k in ["I", "D_left", "D_right", "D_two_way", "M", "I_c", "A"] {
        assert!(mixed[k].as_f64().unwrap().abs() < 1e-12, "{k}");
    }
}

#[test]
fn report_writes_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let state = write_state(dir.path(), "d.json", &delta_family(0.3).unwrap());
    let out_path = dir.path().join("report.json");
    let out = qcorr(&["report", &state, "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("D_two_way"));
    let saved: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    assert!(saved["diagnostics"].is_object());
}

#[test]
fn invalid_state_exits_two_with_reason() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let entries: Vec<String> = (0..16)
        .map(|k| {
            let v = match k {
                0 => 0.6,
                5 => 0.5,
                10 => -0.1,
                _ => 0.0,
            };
            format!("{{\"re\": {v}, \"im\": 0}}")
        })
        .collect();
    std::fs::write(&path, format!("{{\"entries\": [{}]}}", entries.join(","))).unwrap();
    let out = qcorr(&["report", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NegativeEigenvalue"));

    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(qcorr(&["report", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(qcorr(&["sample", "--bogus"]).status.code(), Some(1));
    assert_eq!(qcorr(&["boundary", "--measure", "entanglement"]).status.code(), Some(1));
    assert_eq!(qcorr(&["boundary", "--grid", "1"]).status.code(), Some(1));
    assert_eq!(qcorr(&["sample", "--rank", "5"]).status.code(), Some(1));
    assert_eq!(qcorr(&[]).status.code(), Some(1));
    assert_eq!(qcorr(&["--help"]).status.code(), Some(0));
}

#[test]
fn sample_is_byte_identical_across_runs_and_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, jobs: &str| {
        let p = dir.path().join(name);
        let out = qcorr(&["sample", "--count", "100", "--seed", "7", "--jobs", jobs, "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(p).unwrap()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "1");
    let c = run("c.csv", "3");
    assert_eq!(a, b);
    assert_eq!(a, c);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# qcorr "));
    assert!(text.lines().next().unwrap().contains("seed=7"));
    assert_eq!(text.lines().count(), 102);
}

#[test]
fn pure_state_rows_have_equal_measures() {
    let out = qcorr(&["sample", "--count", "30", "--seed", "2", "--rank", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines().skip(1);
    let cols: Vec<&str> = lines.next().unwrap().split(',').collect();
    let at = |name: &str| cols.iter().position(|c| *c == name).unwrap();
    for line in lines {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(f[at("S")].abs() < 1e-6);
        assert!((f[at("D_left")] - f[at("M")]).abs() < 1e-6, "{line}");
        assert!((f[at("M")] - f[at("A")]).abs() < 1e-6, "{line}");
    }
}

#[test]
fn mid_boundary_is_one_then_two_minus_s() {
    let out = qcorr(&["boundary", "--measure", "mid", "--grid", "21"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(2) {
        let cols: Vec<&str> = line.split(',').collect();
        let s: f64 = cols[0].parse().unwrap();
        let v: f64 = cols[1].parse().unwrap();
        let expected = if s <= 1.0 { 1.0 } else { 2.0 - s };
        assert!((v - expected).abs() < 1e-9, "{line}");
        parse_params(cols[3]).unwrap();
    }
}

#[test]
fn check_passes_on_small_campaign() {
    let out = qcorr(&["check", "--count", "50", "--seed", "4"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
}
