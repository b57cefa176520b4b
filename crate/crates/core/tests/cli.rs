use std::path::Path;
use std::process::{Command, Output};

use salvo::output::read_csv;
use salvo::scenario::preset;

fn salvo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_salvo"))
        .args(args)
        .output()
        .expect("spawn salvo")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn run_into(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "run",
        "--scenario",
        "table2_stationary",
        "--out",
        dir.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    salvo(&args)
}

#[test]
fn presets_lists_every_bundled_scenario() {
    let o = salvo(&["presets"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.lines().count() >= 7);
    for name in [
        "table1_maneuvering",
        "table2_stationary_switching",
        "pip_comparison",
    ] {
        assert!(out.contains(name), "{out}");
    }
}

#[test]
fn spectral_reports_cycle_connectivity() {
    let o = salvo(&["spectral", "--scenario", "table1_maneuvering"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("1.3820"));
}

#[test]
fn validate_accepts_presets_and_names_violated_bounds() {
    let o = salvo(&["validate", "--scenario", "fixedtime_switching"]);
    assert!(o.status.success(), "{}", stderr(&o));

    let dir = tempfile::tempdir().unwrap();
    let mut f = preset("table1_constant").unwrap();
    f.guidance.c = 1.5;
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, f.to_toml()).unwrap();
    let o = salvo(&["validate", "--scenario", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("c in (0,1] violated"), "{}", stderr(&o));
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.toml");
    std::fs::write(&path, "name = \"x\"\ndt = [\n").unwrap();
    let o = salvo(&["validate", "--scenario", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
}

#[test]
fn unknown_scenario_is_a_validation_failure() {
    let o = salvo(&["validate", "--scenario", "no_such_preset"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error[validation]"));
}

#[test]
fn run_writes_stable_artifacts_and_refuses_to_overwrite() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let o = run_into(&a, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(run_into(&b, &[]).status.success());

    let csv_a = std::fs::read(a.join("timeseries.csv")).unwrap();
    assert_eq!(csv_a, std::fs::read(b.join("timeseries.csv")).unwrap());
    let text = String::from_utf8(csv_a).unwrap();
    assert!(text.starts_with("t,agent,r,theta,gamma,delta,tgo,a_cmd,a_real,aT_hat,topo,x,y\n"));
    assert!(!text.lines().skip(1).any(|l| l.split(',').count() != 13));
    let rows = read_csv(&a.join("timeseries.csv")).unwrap();
    assert!(rows.len() > 100);

    let events: serde_json::Value =
        serde_json::from_slice(&std::fs::read(a.join("events.json")).unwrap()).unwrap();
    assert_eq!(events["capture_times"].as_array().unwrap().len(), 5);
    assert!(events["T_f"].as_f64().unwrap() > 0.0);
    assert!(events["config"].is_object());

    let again = run_into(&a, &[]);
    assert_eq!(again.status.code(), Some(4));
    assert!(stderr(&again).starts_with("error[io]"));
    assert!(run_into(&a, &["--force"]).status.success());
}

#[test]
fn overrides_reach_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_into(&dir.path().join("o"), &["--dt", "0.002", "--ts", "2.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let events: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("o").join("events.json")).unwrap())
            .unwrap();
    assert_eq!(events["config"]["dt"].as_f64(), Some(0.002));
    assert_eq!(events["config"]["guidance"]["ts"].as_f64(), Some(2.5));
}

#[test]
fn bad_override_values_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_into(&dir.path().join("o"), &["--dt", "-1"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = run_into(&dir.path().join("o"), &["--law", "bogus"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("unknown law"));
}
