use std::path::Path;
use std::process::{Command, Output};

use prodint::config::{ExperimentConfig, ExperimentKind};
use serde_json::{json, Value};

fn prodint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prodint"))
        .args(args)
        .env("PRODINT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn run_config(dir: &Path, cfg: &Value) -> Output {
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    let out = dir.join("out");
    prodint(&["run", path.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn read_checks(dir: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(dir.join("out").join("checks.csv")).unwrap();
    r.records().map(|x| x.unwrap()).collect()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn no_arguments_lists_every_kind_with_its_module() {
    for out in [prodint(&[]), prodint(&["list-experiments"])] {
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        for k in ExperimentKind::ALL {
            let line = text.lines().find(|l| l.starts_with(k.name())).unwrap_or_else(|| panic!("{k} missing"));
            assert!(line.contains(k.module()), "{line}");
        }
    }
}

#[test]
fn abelian_identities_pass_tightly() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), &json!({"schema_version": 1, "experiment": "identities", "group": "abelian(2)", "samples": 5}));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = read_checks(dir.path());
    assert_eq!(rows.len(), 5 * 12);
    for r in &rows {
        let residual: f64 = r[2].parse().unwrap();
        assert!(residual <= 1e-10, "{r:?}");
        assert_eq!(&r[5], "true");
    }
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["failed"], 0);
    assert_eq!(summary["config"]["group"], "abelian(2)");
    assert!(summary["environment"]["version"].is_string());
    assert!(summary["timestamp"].as_u64().unwrap() > 0);
}

#[test]
fn evolve_so3_reports_midpoint_order_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({
        "schema_version": 1, "experiment": "evolve", "group": "so3", "samples": 2,
        "params": {"schemes": ["midpoint"], "hs": [0.0625, 0.03125, 0.015625, 0.0078125], "oracle_h": 0.0001220703125}
    });
    let out = run_config(dir.path(), &cfg);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = read_checks(dir.path());
    let order = rows.iter().find(|r| &r[0] == "order.midpoint").unwrap();
    assert!(order[2].parse::<f64>().unwrap() <= 0.2);
    let mut table = csv::Reader::from_path(dir.path().join("out/convergence_midpoint.csv")).unwrap();
    let fitted: f64 = table.records().next().unwrap().unwrap()[6].parse().unwrap();
    assert!((fitted - 2.0).abs() <= 0.2, "{fitted}");
}

#[test]
fn duhamel_su2_gaps_small() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), &json!({"schema_version": 1, "experiment": "duhamel", "group": "su2", "samples": 4}));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for r in read_checks(dir.path()).iter().filter(|r| r[0].starts_with("duhamel.")) {
        assert!(r[2].parse::<f64>().unwrap() <= 1e-6, "{r:?}");
    }
}

#[test]
fn schema_errors_exit_two_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), &json!({"schema_version": 1, "experiment": "bogus"}));
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("line") && err.contains("column") && err.contains("bogus"), "{err}");

    let out = run_config(dir.path(), &json!({"schema_version": 1, "experiment": "evolve", "tolerances": {"der_rule": 1.0}}));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("der_rule"));

    let out = run_config(dir.path(), &json!({"schema_version": 1, "experiment": "evolve", "group": "so4"}));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("group"));

    let out = run_config(
        dir.path(),
        &json!({"schema_version": 1, "experiment": "identities", "curves": [{"kind": "constant", "value": [1.0]}]}),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("curves[0]"));

    let out = prodint(&["run", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = prodint(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_check_exits_one_and_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({
        "schema_version": 1, "experiment": "identities", "group": "so3", "samples": 2,
        "tolerances": {"exactness": -1.0}
    });
    let out = run_config(dir.path(), &cfg);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("FAIL exactness.piecewise_constant#0000"), "{}", stderr(&out));
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["failed"], 2);
}

#[test]
fn numerical_failure_exits_one_and_is_named() {
    // the first increment can exceed the gl(2) chart radius
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({"schema_version": 1, "experiment": "mackey", "group": "gl(2)", "samples": 1, "seed": 3, "params": {"decay": 40.0}});
    let out = run_config(dir.path(), &cfg);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    assert!(stderr(&out).contains("mackey.distance"), "{}", stderr(&out));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, json!({"schema_version": 1, "experiment": "groenwall", "group": "su2", "samples": 3}).to_string()).unwrap();
    let csv_for = |seed: &str, name: &str| {
        let out = dir.path().join(name);
        let o = prodint(&["run", path.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", seed]);
        assert!(o.status.success(), "{}", stderr(&o));
        let summary: Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
        assert_eq!(summary["config"]["seed"].to_string(), seed);
        std::fs::read(out.join("checks.csv")).unwrap()
    };
    assert_ne!(csv_for("1", "a"), csv_for("2", "b"));
    assert_eq!(csv_for("1", "a"), csv_for("1", "c"));
}

#[test]
fn configured_curves_replace_random_ones() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({
        "schema_version": 1, "experiment": "mackey", "group": "so3",
        "scheme": {"name": "midpoint", "h": 0.0078125},
        "curves": [
            {"kind": "piecewise", "breakpoints": [0.0, 0.4, 1.0], "segments": [
                {"kind": "constant", "value": [0.5, 0.0, 0.0]},
                {"kind": "polynomial", "coefficients": [[0.0, 0.2, 0.0], [0.0, 0.0, 1.0]]}
            ]},
            {"kind": "fourier", "interval": [0.0, 1.0], "polynomial": [[0.1, 0.0, 0.0]],
             "terms": [{"frequency": 3.0, "cos": [0.0, 0.5, 0.0], "sin": [0.0, 0.0, 0.5]}]}
        ]
    });
    let out = run_config(dir.path(), &cfg);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = read_checks(dir.path());
    assert_eq!(rows.iter().filter(|r| r[0].starts_with("smoothing.endpoint")).count(), 2);
}

#[test]
fn example_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        seen += 1;
    }
    assert!(seen >= ExperimentKind::ALL.len());
}
