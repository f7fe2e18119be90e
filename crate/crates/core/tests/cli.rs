use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

use gapforge::system::{load_schedule, load_system};

fn systems_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../systems")
}

fn sample(name: &str) -> String {
    systems_dir().join(name).to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gapforge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn sample_systems_load() {
    for name in [
        "su2",
        "su4",
        "so3",
        "su2_x_su2",
        "su2_x_su3",
        "wedge2_su4",
        "spin_half_pair",
    ] {
        let (system, notes) = load_system(&systems_dir().join(format!("{name}.json")), false)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(notes.is_empty());
        assert!(!system.controls().is_empty());
    }
    let schedule = load_schedule(&systems_dir().join("so3_schedule.json")).unwrap();
    assert_eq!(schedule.total_duration(), 2.0);
}

#[test]
fn analyze_transitive_system() {
    let out = run(&["analyze", &sample("su2.json"), "--skip-estimate"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = json_stdout(&out);
    assert_eq!(report["certificate"]["kind"], "transitive");
    assert_eq!(report["T_lower"]["kind"], "zero");
    assert_eq!(report["estimate"], Value::Null);
    let keys: Vec<&str> = report
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    assert_eq!(
        keys,
        [
            "n",
            "profile",
            "full_system",
            "certificate",
            "alternate_certificates",
            "estimate",
            "dimension_class",
            "T_lower",
            "notes",
            "config_echo"
        ]
    );
}

#[test]
fn analyze_complex_type_product_has_no_certificate() {
    let out = run(&["analyze", &sample("su2_x_su3.json"), "--skip-estimate"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = json_stdout(&out);
    assert_eq!(report["certificate"], Value::Null);
    assert_eq!(report["T_lower"]["kind"], "unbounded_unknown");

    let out = run(&[
        "analyze",
        &sample("su2_x_su3.json"),
        "--skip-estimate",
        "--tensor",
        "2",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = json_stdout(&out);
    assert_eq!(report["certificate"]["kind"], "tensor");
    let t = report["T_lower"]["radians"].as_f64().unwrap();
    assert!((t - std::f64::consts::FRAC_PI_4).abs() < 1e-11);
}

#[test]
fn analyze_declared_structures() {
    let out = run(&[
        "analyze",
        &sample("wedge2_su4.json"),
        "--skip-estimate",
        "--wedge",
        "4",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = json_stdout(&out);
    assert_eq!(report["certificate"]["kind"], "wedge");
    assert_eq!(report["alternate_certificates"][0]["kind"], "reducible");

    let weights = sample("spin_half_weights.json");
    let out = run(&[
        "analyze",
        &sample("spin_half_pair.json"),
        "--skip-estimate",
        "--cartan",
        &weights,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(json_stdout(&out)["certificate"]["kind"], "cartan");

    let out = run(&[
        "analyze",
        &sample("su2_x_su3.json"),
        "--skip-estimate",
        "--wedge",
        "4",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("wedge"));
}

#[test]
fn report_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&[
        "analyze",
        &sample("so3.json"),
        "--starts",
        "8",
        "--max-iters",
        "100",
        "--report",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).contains("T_lower = 1.570796326795"));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["certificate"]["kind"], "reducible");
    assert_eq!(report["config_echo"]["starts"], 8);
    assert!(report["estimate"]["D_est"].as_f64().unwrap() > 1.4);
}

#[test]
fn input_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let out = run(&["analyze", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{\"n\": 2, \"drift\": ").unwrap();
    let out = run(&["analyze", garbage.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cannot parse"));

    let mut system: Value =
        serde_json::from_str(&std::fs::read_to_string(systems_dir().join("su2.json")).unwrap())
            .unwrap();
    system["controls"][0][0][1]["re"] = Value::from(5.0);
    let bad = dir.path().join("not_skew.json");
    std::fs::write(&bad, system.to_string()).unwrap();
    let out = run(&["analyze", bad.to_str().unwrap(), "--skip-estimate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("control 0"));

    let out = run(&["analyze", &sample("su2.json"), "--tol", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["analyze", &sample("su2.json"), "--starts", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "analyze",
        &sample("su2.json"),
        "--tensor",
        "2",
        "2",
        "--wedge",
        "4",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn drift_normalization() {
    let dir = tempfile::tempdir().unwrap();
    let mut system: Value =
        serde_json::from_str(&std::fs::read_to_string(systems_dir().join("su2.json")).unwrap())
            .unwrap();
    for row in system["drift"].as_array_mut().unwrap() {
        for entry in row.as_array_mut().unwrap() {
            for part in ["re", "im"] {
                entry[part] = Value::from(entry[part].as_f64().unwrap() * 3.0);
            }
        }
    }
    let path = dir.path().join("scaled.json");
    std::fs::write(&path, system.to_string()).unwrap();
    let out = run(&["analyze", path.to_str().unwrap(), "--skip-estimate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("operator norm"));

    let out = run(&[
        "analyze",
        path.to_str().unwrap(),
        "--skip-estimate",
        "--normalize",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let notes = json_stdout(&out)["notes"].to_string();
    assert!(notes.contains("drift rescaled"));
}

#[test]
fn oracles() {
    let out = run(&[
        "oracle",
        "det-sum",
        "--k",
        "3",
        "--samples",
        "2000",
        "--grid",
        "51",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json_stdout(&out);
    assert_eq!(doc["within_bound"], true);
    assert!((doc["grid_max"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let out = run(&["oracle", "tensor-bound", "--samples", "2000"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json_stdout(&out);
    assert!(doc["max_overlap"].as_f64().unwrap() <= std::f64::consts::FRAC_1_SQRT_2 + 1e-12);

    let out = run(&["oracle", "det-sum", "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["oracle", "tensor-bound", "--p", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn trace_stays_under_speed_bound() {
    let schedule = sample("so3_schedule.json");
    let out = run(&[
        "trace",
        &sample("so3.json"),
        "--controls",
        &schedule,
        "--horizon",
        "2",
        "--samples",
        "9",
        "--starts",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json_stdout(&out);
    assert_eq!(doc["violations"], 0);
    let samples = doc["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 9);
    let last = samples.last().unwrap();
    assert_eq!(last["t"], 2.0);
    assert!(last["d_numeric"].as_f64().unwrap() > 0.5);

    let out = run(&[
        "trace",
        &sample("so3.json"),
        "--controls",
        &schedule,
        "--horizon",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "trace",
        &sample("so3.json"),
        "--controls",
        &schedule,
        "--horizon",
        "1",
        "--samples",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
