use std::io::Write;
use std::process::{Command, Output};

use liouville_cli::Report;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liouville"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> (Report, i32) {
    let mut full = args.to_vec();
    full.push("--json");
    let out = run(&full);
    let text = String::from_utf8(out.stdout).unwrap();
    let r =
        Report::from_json(&text).unwrap_or_else(|e| panic!("{e}\n{text}\n{}", String::from_utf8_lossy(&out.stderr)));
    (r, out.status.code().unwrap())
}

fn temp_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".toml").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn analyze_catalog_entries() {
    let (r, code) = report(&[
        "analyze",
        "--catalog",
        "PIII",
        "--params",
        "alpha=1,beta=0,gamma=1,delta=0",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r.verdict.as_deref(), Some("Metrisable"));
    assert_eq!(r.mobility.as_ref().unwrap().m, Some(2));
    assert!(r.metric.is_some());

    let (r, code) = report(&["analyze", "--catalog", "PII", "--params", "alpha=1"]);
    assert_eq!(code, 0);
    assert_eq!(r.verdict.as_deref(), Some("NotMetrisable"));
    assert_eq!(r.mobility.as_ref().unwrap().m, Some(1));
    assert!(r.metric.is_none());
}

#[test]
fn analyze_a_flat_input_file() {
    let f = temp_file("[coefficients]\nA0 = \"0\"\nA1 = \"0\"\nA2 = \"0\"\nA3 = \"0\"\n");
    let (r, code) = report(&["analyze", f.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r.verdict.as_deref(), Some("FlatMetrisable"));
    assert_eq!(r.mobility.as_ref().unwrap().m, Some(6));
}

#[test]
fn exported_entries_analyze_like_the_catalog() {
    let out = run(&["catalog", "export", "PV", "--params", "alpha=1,beta=1"]);
    assert!(out.status.success());
    let f = temp_file(&String::from_utf8(out.stdout).unwrap());
    let (from_file, _) = report(&["analyze", f.path().to_str().unwrap()]);
    let (from_catalog, _) = report(&["analyze", "--catalog", "PV", "--params", "alpha=1,beta=1"]);
    assert_eq!(from_file.verdict, from_catalog.verdict);
    assert_eq!(from_file.mobility, from_catalog.mobility);
}

#[test]
fn verify_stored_data() {
    for name in ["PIII", "PV", "XXXII", "Dini"] {
        let (r, code) = report(&["verify", name]);
        assert_eq!(code, 0, "{name}");
        assert!(!r.checks.is_empty());
        assert!(r.checks.iter().all(|c| c.passed), "{name}");
    }
    let (r, code) = report(&["verify", "PIII", "--constants", "3,-1/2"]);
    assert_eq!(code, 0);
    assert!(r.checks.iter().all(|c| c.passed));
}

#[test]
fn dynamics_of_pvi_and_piii() {
    let (r, code) = report(&["dynamics", "PVI", "--params", "delta=1/2", "--init", "2,0.5,0.1"]);
    assert_eq!(code, 0);
    assert!(r.integrals.iter().all(|i| i.passed && i.relative < 1e-6));
    assert!(r.dynamics.unwrap().flat_chart_residual.unwrap() < 1e-6);

    let (r, code) = report(&[
        "dynamics",
        "PIII",
        "--params",
        "alpha=1,gamma=-1",
        "--init",
        "1,1,0",
        "--span",
        "1,3",
    ]);
    assert_eq!(code, 0);
    assert!(!r.integrals.is_empty());
    assert!(r.integrals.iter().all(|i| i.relative < 1e-8));
    assert!(r.dynamics.unwrap().geodesic_deviation.unwrap() < 1e-6);
}

#[test]
fn dynamics_reports_a_pole() {
    let (r, code) = report(&["dynamics", "PI", "--init", "0,1,0", "--span", "0,5"]);
    assert_eq!(code, 0);
    let d = r.dynamics.unwrap();
    let pole = d.pole_at.expect("pole detected");
    assert!(pole > 0.5 && pole < 5.0);
    assert!(d.last[0] < 5.0);
}

#[test]
fn coalescence_table() {
    let (r, code) = report(&["coalesce", "--alpha", "1", "--gamma", "1"]);
    assert_eq!(code, 0);
    assert_eq!(r.coalescence.len(), 3);
    assert!(r.coalescence[1..].iter().all(|l| l.ratio.unwrap() >= 8.0));

    let (r, code) = report(&["coalesce", "--alpha", "3/2", "--gamma", "0", "--constants", "1,2"]);
    assert_eq!(code, 0);
    assert!(r.coalescence[1..].iter().all(|l| l.ratio.unwrap() >= 8.0));

    let out = run(&["coalesce", "--alpha", "1", "--gamma", "1", "--eps", "1/1000,1/100"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_reports_round_trip() {
    let out = run(&[
        "dynamics",
        "PV",
        "--params",
        "alpha=1,beta=1",
        "--init",
        "1,0.5,0",
        "--json",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let r = Report::from_json(&text).unwrap();
    assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    assert_eq!(r.to_json().trim(), text.trim());
}

#[test]
fn usage_and_parse_errors_exit_2() {
    let f = temp_file("[coefficients]\nA0 = \"y^\"\nA1 = \"0\"\nA2 = \"0\"\nA3 = \"0\"\n");
    assert_eq!(run(&["analyze", f.path().to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--catalog", "PVII"]).status.code(), Some(2));
    assert_eq!(
        run(&["analyze", "--catalog", "PII", "--params", "beta=1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["dynamics", "PI", "--init", "0,1"]).status.code(), Some(2));
    assert_eq!(
        run(&["dynamics", "PI", "--init", "0,1,0", "--span", "1,2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn catalog_listing() {
    let out = run(&["catalog", "list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["PI", "PII", "PIII", "PIV", "PV", "PVI", "XXXII", "Dini"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}
