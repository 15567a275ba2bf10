use std::path::Path;
use std::process::{Command, Output};

use pwl_infinity::{displacement_series, SystemSpec};
use serde_json::Value;
use tempfile::TempDir;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pwl-infinity"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: {}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const CRITICAL: &str = r#"{"form": "equilibrium", "gamma_L": "-1/8", "gamma_R": "1/8", "x_L": 1, "x_R": 1, "b": "-1/4"}"#;
const PERTURBED: &str = r#"{"form": "equilibrium", "gamma_L": "-1/8", "gamma_R": "1638355/13106841",
 "x_L": 1, "x_R": "552751/556327", "b": "-260534/1045519"}"#;

#[test]
fn classify_reports_third_order_focus() {
    let dir = TempDir::new().unwrap();
    let out = bin(&[
        "classify",
        "--input",
        &write(dir.path(), "c.json", CRITICAL),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["output"]["kind"], "WeakFocus");
    assert_eq!(v["output"]["order"], 3);
    assert_eq!(v["output"]["stability"], "stable");
    assert_eq!(v["input"]["verbatim"]["gamma_L"]["text"], "-1/8");
}

#[test]
fn classify_reports_center_type() {
    let dir = TempDir::new().unwrap();
    let f = write(
        dir.path(),
        "b.json",
        r#"{"form": "canonical", "gamma_L": 0.3, "gamma_R": -0.3, "alpha_L": 0, "alpha_R": 0, "b": 0}"#,
    );
    let v = json(&bin(&["classify", "--input", &f]));
    assert_eq!(v["output"]["kind"], "Center");
    assert_eq!(v["output"]["center_type"], "b");
}

#[test]
fn input_errors_exit_2_with_location() {
    let dir = TempDir::new().unwrap();
    let f = write(
        dir.path(),
        "n.json",
        r#"{"form": "lienard", "T_L": 2, "D_L": 1, "a_L": 0, "T_R": 0, "D_R": 1, "a_R": 0, "b": 0}"#,
    );
    let out = bin(&["classify", "--input", &f]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("focus"));

    let f = write(
        dir.path(),
        "bad.json",
        "{\"form\": \"canonical\",\n \"gamma_L\": \"1/x\"}",
    );
    let out = bin(&["classify", "--input", &f]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("gamma_L"), "{err}");

    assert_eq!(
        bin(&["classify", "--input", "/nonexistent.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn coeffs_match_library() {
    let dir = TempDir::new().unwrap();
    let v = json(&bin(&[
        "coeffs",
        "--input",
        &write(dir.path(), "p.json", PERTURBED),
        "--order",
        "6",
    ]));
    let spec = SystemSpec::from_abscissas(
        -0.125,
        1638355.0 / 13106841.0,
        1.0,
        552751.0 / 556327.0,
        -260534.0 / 1045519.0,
    );
    let lib = displacement_series(&spec, 6).unwrap();
    let cli: Vec<f64> = v["output"]["deltas"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d.as_f64().unwrap())
        .collect();
    assert_eq!(cli, lib.deltas);
}

#[test]
fn cycles_on_worked_example_and_edge_cases() {
    let dir = TempDir::new().unwrap();
    let v = json(&bin(&[
        "cycles",
        "--input",
        &write(dir.path(), "p.json", PERTURBED),
    ]));
    let cycles = v["output"]["cycles"].as_array().unwrap();
    assert_eq!(cycles.len(), 3);
    assert!(cycles.iter().all(|c| c["hyperbolic"] == true));

    let center = write(
        dir.path(),
        "a.json",
        r#"{"form": "equilibrium", "gamma_L": 0, "gamma_R": 0, "x_L": -1, "x_R": 2, "b": 0}"#,
    );
    let v = json(&bin(&["cycles", "--input", &center]));
    assert_eq!(v["output"]["period_annulus"], true);
    assert!(v["output"]["cycles"].as_array().unwrap().is_empty());

    let hyperbolic = write(
        dir.path(),
        "h.json",
        r#"{"form": "canonical", "gamma_L": 0.2, "gamma_R": 0.1, "alpha_L": 0, "alpha_R": 0, "b": 0}"#,
    );
    let v = json(&bin(&["cycles", "--input", &hyperbolic]));
    assert!(v["output"]["cycles"].as_array().unwrap().is_empty());

    let out = bin(&["cycles", "--input", &hyperbolic, "--u0-max", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cycles_csv_and_traces() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "p.json", PERTURBED);
    let trace_dir = dir.path().join("traces");
    std::fs::create_dir(&trace_dir).unwrap();
    let out = bin(&[
        "cycles",
        "--input",
        &input,
        "--format",
        "csv",
        "--emit-trace",
        "--trace-dir",
        trace_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    for k in 1..=3 {
        let trace = std::fs::read_to_string(trace_dir.join(format!("cycle_{k}.csv"))).unwrap();
        assert!(trace.starts_with("t,x,y,event"));
    }
}

#[test]
fn reproduce_example_passes_and_fails_honestly() {
    let dir = TempDir::new().unwrap();
    let out = bin(&[
        "reproduce-example",
        "--emit-trace",
        "--trace-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let log = String::from_utf8_lossy(&out.stderr);
    assert!(log.contains("PASS") && !log.contains("FAIL"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 3);

    let out = bin(&["reproduce-example", "--tolerance", "1e-20"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL"));
}

#[test]
fn unfold_and_region() {
    let v = json(&bin(&[
        "unfold",
        "--gamma-l=-0.125",
        "--x-l",
        "1",
        "--target=-4.43719886e-8,3.993655760e-5,-1.15001344e-2",
        "--find-cycles",
    ]));
    assert!(v["output"]["result"]["residual"].as_f64().unwrap() <= 1e-12);
    assert_eq!(v["output"]["cycles"]["cycles"].as_array().unwrap().len(), 3);

    let out = bin(&[
        "unfold",
        "--gamma-l=-0.125",
        "--x-l",
        "1",
        "--target",
        "0.5,0,0",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = bin(&[
        "region",
        "--delta3=-0.3",
        "--resolution",
        "16",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("kind,delta1,delta2,count"));
    assert_eq!(
        text.lines().filter(|l| l.starts_with("label,")).count(),
        256
    );
    assert_eq!(text.lines().filter(|l| l.starts_with("cusp,")).count(), 1);
}

#[test]
fn reports_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "p.json", PERTURBED);
    let strip = |mut v: Value| {
        v["timing_ms"] = Value::Null;
        v
    };
    for args in [
        vec!["coeffs", "--input", &input],
        vec!["cycles", "--input", &input],
    ] {
        let a = strip(json(&bin(&args)));
        let b = strip(json(&bin(&args)));
        assert_eq!(a, b);
    }
}

#[test]
fn output_file_receives_report() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "c.json", CRITICAL);
    let target = dir.path().join("report.json");
    let out = bin(&[
        "coeffs",
        "--input",
        &input,
        "--output",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    let d4 = v["output"]["deltas"][3].as_f64().unwrap();
    assert!((d4 - 1.06495899308488).abs() < 1e-11);
}
