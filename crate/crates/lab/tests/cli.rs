use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

fn liedeg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liedeg")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "unknown.json", r#"{"bogus": 1}"#);
    assert_eq!(code(&liedeg(&["scenario", "anzai-torus", "--config", &unknown])), 2);
    let no_cocycle = write(dir.path(), "custom.json", r#"{"reps": ["SU2:1"]}"#);
    assert_eq!(code(&liedeg(&["scenario", "custom", "--config", &no_cocycle])), 2);
    let bad_rep = write(dir.path(), "rep.json", r#"{"reps": ["SU2:x"]}"#);
    assert_eq!(code(&liedeg(&["scenario", "su2-straighten", "--config", &bad_rep])), 2);
    let mismatch = write(dir.path(), "tag.json", r#"{"reps": ["SO3:1"]}"#);
    assert_eq!(code(&liedeg(&["scenario", "anzai-torus", "--config", &mismatch])), 2);
}

#[test]
fn degenerate_degree_trips_the_numeric_guard() {
    // k = 0 makes the manufactured cocycle a coboundary with vanishing degree.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "k0.json", r#"{"cocycle": {"builtin": "su2-manufactured", "k": 0}, "reps": ["SU2:1"], "n_corr": 5}"#);
    let out = dir.path().join("out");
    let run = liedeg(&["scenario", "custom", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&run), 3, "{}", String::from_utf8_lossy(&run.stderr));
}

#[test]
fn io_and_series_errors_exit_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    assert_eq!(code(&liedeg(&["plot", missing.to_str().unwrap()])), 4);
    let malformed = write(dir.path(), "bad.csv", "1,2\n");
    assert_eq!(code(&liedeg(&["plot", &malformed])), 4);
    let empty = write(dir.path(), "empty.csv", "N,re,im,abs,err_estimate\n");
    assert_eq!(code(&liedeg(&["plot", &empty])), 4);
    let file = write(dir.path(), "blocker", "");
    let nested = Path::new(&file).join("out");
    assert_eq!(code(&liedeg(&["scenario", "anzai-torus", "--out", nested.to_str().unwrap()])), 4);
}

#[test]
fn scenario_references_only_existing_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("anzai");
    let run = liedeg(&["scenario", "anzai-torus", "--out", out.to_str().unwrap(), "--seed", "3"]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["seed"], 3);
    let files = report["files"].as_array().unwrap();
    assert!(!files.is_empty());
    for f in files {
        assert!(out.join(f.as_str().unwrap()).is_file(), "{f}");
    }
    assert!(out.join(report["timings_file"].as_str().unwrap()).is_file());
    for s in report["spectral"].as_array().unwrap() {
        let q: i64 = s["rep"].as_str().unwrap().trim_start_matches("T:").parse().unwrap();
        let (mix, ac) = (s["mixing"]["verdict"].as_str().unwrap(), s["ac"]["verdict"].as_str().unwrap());
        if q == 0 {
            assert_eq!(mix, "NO-CLAIM");
        } else {
            assert_eq!((mix, ac), ("SUPPORTED", "AC-PREDICTED"), "q = {q}");
        }
    }
}

#[test]
fn degree_corr_and_rep_check_commands() {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let deg = liedeg(&["degree", "anzai-torus", "--n", "2000"]);
    assert_eq!(code(&deg), 0);
    let section: serde_json::Value = serde_json::from_slice(&deg.stdout).unwrap();
    let m = section["m_star"]["coords"][0].as_f64().unwrap();
    assert!((m - 2.0 * PI * golden).abs() <= 1e-12, "{m}");

    let corr = liedeg(&["corr", "anzai-torus", "--rep", "T:1", "--n-max", "10"]);
    assert_eq!(code(&corr), 0);
    let text = String::from_utf8(corr.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,re,im,abs,err_estimate"));
    let abs: Vec<f64> = lines.map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(abs.len(), 11);
    // The probe carries frequencies {0, 1}; the Anzai shift separates them from N = 2 on.
    assert!(abs[1] > 0.1);
    assert!(abs[2..].iter().all(|a| *a <= 1e-10));

    let check = liedeg(&["rep-check", "U2:3,-1", "--pairs", "50"]);
    assert_eq!(code(&check), 0);
    let v: serde_json::Value = serde_json::from_slice(&check.stdout).unwrap();
    assert!(v["homomorphism_defect"].as_f64().unwrap() <= 1e-10);
    assert_eq!(code(&liedeg(&["rep-check", "SU3:1"])), 2);
}
