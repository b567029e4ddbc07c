//! End-to-end tests of the `rel-orbit` binary: output formats, exit codes,
//! and byte-level reproducibility.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rel-orbit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn cf_prints_the_expansion() {
    let out = run(&["cf", "--alpha", "golden", "--depth", "10"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "[0;1,1,1,1,1,1,1,1,1,1]\n");

    let out = run(&["cf", "--alpha", "pow2", "--depth", "4"]);
    assert_eq!(stdout(&out), "[0;2,4,8,16]\n");

    let out = run(&["cf", "--alpha", "sqrt2m1", "--depth", "5"]);
    assert_eq!(stdout(&out), "[0;2,2,2,2,2]\n");
}

#[test]
fn reduce_emits_the_short_slit() {
    let out = run(&["reduce", "--alpha", "sqrt2m1", "--N", "14"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["anchor"], 2);
    assert_eq!(v["dy_exact"], "20-14*sqrt(2)");
}

#[test]
fn orbit_writes_records_and_classifies() {
    let csv_path = std::env::temp_dir().join("rel_orbit_test_pow2.csv");
    let _ = std::fs::remove_file(&csv_path);
    let out = run(&[
        "orbit",
        "--alpha",
        "pow2",
        "--tremor",
        "1",
        "0",
        "--depth",
        "12",
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["verdict"]["kind"], "recurrent-evidence");

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 13); // header + 12 records
    let last: Vec<&str> = lines[12].split(',').collect();
    let distance: f64 = last[7].parse().unwrap();
    assert!(distance < 1e-2, "final distance {distance}");
    let _ = std::fs::remove_file(&csv_path);
}

#[test]
fn theorem_check_reports_agreement() {
    let out = run(&[
        "theorem-check",
        "--alpha",
        "golden",
        "--tremor",
        "1",
        "0",
        "--depth",
        "10",
        "--K",
        "1",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["agree"], true);
    assert_eq!(
        report["cf_verdict"]["kind"],
        "badly-approximable-evidence"
    );
    assert_eq!(report["empirical_verdict"]["kind"], "separated-evidence");
}

#[test]
fn render_produces_colored_svg() {
    let svg_path = std::env::temp_dir().join("rel_orbit_test_fig.svg");
    let _ = std::fs::remove_file(&svg_path);
    let out = run(&[
        "render",
        "--alpha",
        "sqrt2m1",
        "--N",
        "14",
        "--svg",
        svg_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("viewBox=\"0 0 1000"));
    assert!(svg.contains("#d94040"));
    assert!(svg.contains("stroke-width=\"2\""));
    let _ = std::fs::remove_file(&svg_path);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = [
        "checkerboard",
        "--alpha",
        "golden",
        "--N",
        "11",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);

    let args = ["orbit", "--alpha", "sqrt3m1", "--tremor", "1", "0", "--depth", "6"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn surface_json_input_is_accepted() {
    let json = r#"{"torus":{"a":"1","alpha":"golden"},"N":"1","tremor":["1","0"]}"#;
    let out = run(&["orbit", "--input", json, "--depth", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["verdict"]["kind"], "separated-evidence");
}

#[test]
fn exit_codes_and_json_errors() {
    // precondition violation: rational alpha
    let out = run(&["cf", "--alpha", "3/4", "--depth", "5", "--json"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(err["code"], "RATIONAL_INPUT");
    assert_eq!(err["module"], "exact");
    assert!(err["message"].as_str().unwrap().contains("rational"));

    // equal tremor shears degenerate to the horocycle case
    let out = run(&[
        "theorem-check",
        "--alpha",
        "golden",
        "--tremor",
        "1",
        "1",
        "--depth",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // a finite quotient list that cannot support the requested geometry
    // exhausts its validated precision
    let out = run(&["reduce", "--alpha", "[0;1,1,1]", "--N", "40", "--json"]);
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(err["code"], "PRECISION_EXHAUSTED");
}

#[test]
fn missing_alpha_is_an_input_error() {
    let out = run(&["cf", "--depth", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn checkerboard_reports_exact_areas() {
    let out = run(&["checkerboard", "--alpha", "golden", "--N", "11"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["B2"]["exact"], "-121/4+55/4*sqrt(5)");
    let b1: f64 = v["B1"]["decimal"].as_str().unwrap()[..17].parse().unwrap();
    let b2: f64 = v["B2"]["decimal"].as_str().unwrap()[..17].parse().unwrap();
    assert!((b1 + b2 - 1.0).abs() < 1e-12);
    let csv_path: PathBuf = std::env::temp_dir().join("rel_orbit_test_cells.csv");
    let _ = std::fs::remove_file(&csv_path);
    let out = run(&[
        "checkerboard",
        "--alpha",
        "golden",
        "--N",
        "11",
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("piece,color,area,area_exact"));
    assert!(csv.lines().count() > 11);
    let _ = std::fs::remove_file(&csv_path);
}

#[test]
fn hyphen_leading_scalars_are_accepted() {
    let out = run(&["reduce", "--alpha", "-1/2+1/2*sqrt(5)", "--N", "11"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["dy_exact"], "11-5*sqrt(5)");

    let out = run(&[
        "orbit", "--alpha", "golden", "--tremor", "-1/2", "1/3", "--depth", "4",
    ]);
    assert!(out.status.success());
}
