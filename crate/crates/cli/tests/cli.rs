use std::path::Path;
use std::process::{Command, Output};

use heatctl::example::ReferenceExample;
use heatctl::io::{read_field_csv, write_half_plane_csv};
use heatctl::{GridSpec, HalfPlaneField, PhysicalField};
use serde_json::Value;

fn heatctl(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatctl"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(path: impl AsRef<Path>) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn basis_check_passes_and_names_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let ok = heatctl(dir.path(), &["--quiet", "basis-check"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    let r = json(dir.path().join("out/basis_check.json"));
    assert_eq!(r["max_order"], 12);
    assert_eq!(r["passed"], true);

    let bad = heatctl(
        dir.path(),
        &["basis-check", "--max-order", "6", "--corrupt-normalization"],
    );
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("orthonormality"));

    let too_high = heatctl(dir.path(), &["basis-check", "--max-order", "900"]);
    assert_eq!(too_high.status.code(), Some(2));
}

#[test]
fn synthesize_writes_control_and_budget() {
    let dir = tempfile::tempdir().unwrap();
    let o = heatctl(dir.path(), &["synthesize", "--out", "syn"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = dir.path().join("syn");
    for f in [
        "control.json",
        "control.csv",
        "synthesis.json",
        "admissibility.json",
        "plot_control.py",
    ] {
        assert!(out.join(f).is_file(), "{f}");
    }
    // a 2^(-3/2) + b 2^(-9) / sqrt(9!) + c / 10
    let plug_in = 2.622851155438146 * 0.5f64.powf(1.5)
        + 2.350732202502537 * 2f64.powi(-9) / 362880f64.sqrt()
        + 15.31493739172921 / 10.0;
    let s = json(out.join("synthesis.json"));
    let total = s["budget"]["total"].as_f64().unwrap();
    assert!((total - plug_in).abs() < 1e-14 * plug_in, "{total} {plug_in}");
    assert!((total - 2.458819).abs() < 1e-6);
    let g = json(out.join("control.json"))["g_pm"].clone();
    assert_eq!(g.as_array().unwrap().len(), 4);

    let csv = std::fs::read_to_string(out.join("control.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("x2,xi,u"));
    assert_eq!(csv.lines().count(), 1 + 81 * 200);
}

#[test]
fn synthesize_rejects_guard_violation() {
    let dir = tempfile::tempdir().unwrap();
    let o = heatctl(dir.path(), &["synthesize", "--N", "6", "--l", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("l >= 2(N+2)/T"), "{}", stderr(&o));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn zero_states_give_zero_control() {
    let dir = tempfile::tempdir().unwrap();
    let o = heatctl(
        dir.path(),
        &[
            "--quiet",
            "--grid-n",
            "128",
            "synthesize",
            "--initial",
            "zero",
            "--target",
            "zero",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = json(dir.path().join("out/synthesis.json"));
    assert!(s["budget"].is_null());
    assert_eq!(s["sup_control"], 0.0);
    for row in s["g_pm"].as_array().unwrap() {
        assert!(row.as_array().unwrap().iter().all(|v| v.as_f64() == Some(0.0)));
    }
}

#[test]
fn simulate_example_configurations() {
    let dir = tempfile::tempdir().unwrap();
    let o = heatctl(dir.path(), &["--quiet", "--out", "coarse", "simulate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let coarse = json(dir.path().join("coarse/report.json"));
    assert_eq!(coarse["passed"], true);
    for f in [
        "difference.csv",
        "difference.json",
        "section_x1.csv",
        "section_x2.csv",
        "plot_sections.py",
    ] {
        assert!(dir.path().join("coarse").join(f).is_file(), "{f}");
    }

    // file sets (6, 6, 50); the flag raises l
    let cfg = dir.path().join("fine.json");
    std::fs::write(
        &cfg,
        r#"{"params": {"N": 6, "M": 6, "l": 50}, "out": "fine", "export": {"plot_scripts": false}}"#,
    )
    .unwrap();
    let o = heatctl(
        dir.path(),
        &["--quiet", "--config", "fine.json", "simulate", "--l", "200"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let fine = json(dir.path().join("fine/report.json"));
    assert_eq!(fine["params"]["l"], 200);
    assert_eq!(fine["params"]["N"], 6);
    assert!(!dir.path().join("fine/plot_sections.py").exists());
    let (e1, e2) = (
        coarse["measured_error"].as_f64().unwrap(),
        fine["measured_error"].as_f64().unwrap(),
    );
    assert!(e2 < e1, "{e1} {e2}");
    assert!(e2 <= fine["budget"]["total"].as_f64().unwrap() + 1e-3);

    let r = heatctl(dir.path(), &["--quiet", "--out", "fine", "report"]);
    assert_eq!(r.status.code(), Some(0));
}

#[test]
fn user_fields_round_trip_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let grid = GridSpec::square(40.0, 128).unwrap();
    let ex = ReferenceExample::default();
    let w0 = HalfPlaneField::from_fn(grid, |a, b| ex.initial(a, b)).unwrap();
    let wt = HalfPlaneField::from_fn(grid, |a, b| ex.target(a, b)).unwrap();
    write_half_plane_csv(dir.path().join("w0.csv"), &w0).unwrap();
    write_half_plane_csv(dir.path().join("wt.csv"), &wt).unwrap();

    let o = heatctl(
        dir.path(),
        &[
            "--quiet",
            "--grid-n",
            "128",
            "simulate",
            "--initial",
            "w0.csv",
            "--target",
            "wt.csv",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = json(dir.path().join("out/report.json"));
    assert_eq!(report["coefficient_route"], "grid");
    assert!(report["budget"].is_null());

    let back = read_field_csv(dir.path().join("out/target.csv"), &grid, 2.0).unwrap();
    let exact = PhysicalField::from_fn(grid, 2.0, |a, b| ex.target(a, b)).unwrap();
    assert!(back.sub(&exact).unwrap().l2_norm() <= 1e-12);
}

#[test]
fn counterexample_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = heatctl(dir.path(), &["--quiet", "counterexample"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("out/counterexample.csv")).unwrap();
    let norms: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(norms.len(), 6);
    assert!(norms.windows(2).all(|w| w[1] > w[0]));
    let inc: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    for w in inc.windows(2) {
        assert!((w[1] / w[0] - 2f64.powf(0.25)).abs() < 0.1 * 2f64.powf(0.25));
    }

    let o = heatctl(
        dir.path(),
        &["--quiet", "--out", "one", "counterexample", "--levels", "1"],
    );
    assert_eq!(o.status.code(), Some(0));
    let s = json(dir.path().join("one/counterexample.json"));
    let rows = s["report"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0]["norm"].as_f64().unwrap() > 0.0);

    let o = heatctl(dir.path(), &["counterexample", "--levels", "40"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn report_combines_pass_flags() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(heatctl(dir.path(), &["report"]).status.code(), Some(2));

    heatctl(dir.path(), &["--quiet", "counterexample", "--levels", "3"]);
    let ok = heatctl(dir.path(), &["report"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("passed true"));

    heatctl(
        dir.path(),
        &["--quiet", "basis-check", "--max-order", "3", "--corrupt-normalization"],
    );
    assert_eq!(heatctl(dir.path(), &["--quiet", "report"]).status.code(), Some(1));
    let only = heatctl(dir.path(), &["--quiet", "report", "out/counterexample.json"]);
    assert_eq!(only.status.code(), Some(0));
}

#[test]
fn bad_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), r#"{"unknown": true}"#).unwrap();
    let o = heatctl(dir.path(), &["--config", "c.json", "counterexample"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("c.json"));
}
