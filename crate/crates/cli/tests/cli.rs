use std::io::Write;
use std::process::Command;

use gsd_bench::{read_evaluations, write_evaluations, IngestError, RunConfig};
use gsd_core::preference::{Dimension, MetricValue, ScaleSpec};

fn spec() -> ScaleSpec {
    ScaleSpec::new(vec![
        Dimension::cardinal("acc"),
        Dimension::ordinal("cost", &["low", "high"]).lower_better(),
    ])
    .unwrap()
}

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gsd-bench"))
}

#[test]
fn ingest_two_by_two() {
    let csv = "subject,instance,metric,value\nA,d1,acc,0.5\nA,d2,acc,0.7\nB,d1,acc,0.4\nB,d2,acc,0.9\n";
    let s = ScaleSpec::new(vec![Dimension::cardinal("acc")]).unwrap();
    let t = read_evaluations(csv.as_bytes(), &s).unwrap();
    assert_eq!(t.subjects(), ["A", "B"]);
    assert_eq!(t.instances(), ["d1", "d2"]);
    assert_eq!(t.value(1, 1), [MetricValue::Number(0.9)]);
}

#[test]
fn lower_better_levels_are_negated_ranks() {
    let csv = "subject,instance,metric,value\nA,d1,acc,0.5\nA,d1,cost,high\n";
    let t = read_evaluations(csv.as_bytes(), &spec()).unwrap();
    assert_eq!(t.coords(0, 0), [0.5, -1.0]);
}

#[test]
fn ingest_errors_name_the_problem() {
    let undeclared = "subject,instance,metric,value\nA,d1,acc,0.5\nA,d1,speed,3\n";
    match read_evaluations(undeclared.as_bytes(), &spec()) {
        Err(IngestError::UndeclaredMetric { line, metric }) => assert_eq!((line, metric.as_str()), (3, "speed")),
        other => panic!("{other:?}"),
    }
    let level = "subject,instance,metric,value\nA,d1,acc,0.5\nA,d1,cost,medium\n";
    assert!(matches!(
        read_evaluations(level.as_bytes(), &spec()),
        Err(IngestError::UnknownOrdinalLevel { line: 3, .. })
    ));
    let missing = "subject,instance,metric,value\nA,d1,acc,0.5\nA,d1,cost,low\nB,d1,acc,0.1\n";
    match read_evaluations(missing.as_bytes(), &spec()) {
        Err(IngestError::MissingCell { subject, metric, .. }) => assert_eq!((subject.as_str(), metric.as_str()), ("B", "cost")),
        other => panic!("{other:?}"),
    }
    let number = "subject,instance,metric,value\nA,d1,acc,zero\nA,d1,cost,low\n";
    assert!(matches!(
        read_evaluations(number.as_bytes(), &spec()),
        Err(IngestError::ParseError { line: 2, .. })
    ));
    let header = "subject,instance,value\nA,d1,0.5\n";
    assert!(matches!(
        read_evaluations(header.as_bytes(), &spec()),
        Err(IngestError::ParseError { line: 1, .. })
    ));
}

#[test]
fn ingest_emit_round_trip() {
    let cfg = RunConfig::load(data("bench/config.json").as_ref()).unwrap();
    let original = std::fs::read_to_string(data("bench/evals.csv")).unwrap();
    let t = read_evaluations(original.as_bytes(), &cfg.metrics).unwrap();
    let mut out = Vec::new();
    write_evaluations(&t, &mut out).unwrap();
    let again = read_evaluations(out.as_slice(), &cfg.metrics).unwrap();
    assert_eq!(again, t);
    let mut out2 = Vec::new();
    write_evaluations(&again, &mut out2).unwrap();
    assert_eq!(out, out2);
}

#[test]
fn config_rejects_unknown_fields_and_bad_values() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"metrics": [], "deltas": [0.0], "bogus": 1}"#).unwrap();
    assert!(RunConfig::load(&path).is_err());
    std::fs::write(
        &path,
        r#"{"metrics": [{"name": "a", "scale": "cardinal", "direction": "higher_better"}], "alpha": 1.5}"#,
    )
    .unwrap();
    assert!(RunConfig::load(&path).is_err());
}

#[test]
fn compare_reports_the_figure_choice() {
    let out = bin()
        .args(["compare", "--system", &data("elicitation/system.json")])
        .args(["--credal", &data("elicitation/credal.json")])
        .args(["--acts", &data("elicitation/acts.json"), "--delta", "0.05"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["result"]["choice_und"], serde_json::json!(["X1"]));
    assert_eq!(r["result"]["vertex_count"], 4);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // strict intensity cycle: infeasible for every positive delta
    let sys = dir.path().join("cycle.json");
    std::fs::write(
        &sys,
        r#"{"elements": ["t", "x", "b"], "r1": [["t", "x"], ["x", "b"]],
            "r2": [[["x", "b"], ["t", "x"]], [["t", "x"], ["x", "b"]], [["t", "x"], ["b", "b"]], [["b", "b"], ["t", "x"]]]}"#,
    )
    .unwrap();
    let s = bin().args(["consistency", "--system"]).arg(&sys).args(["--delta", "0.1"]).output().unwrap();
    assert_eq!(s.status.code(), Some(3));
    let missing = bin().args(["consistency", "--system", "/nonexistent.json"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "subject,instance,metric,value\nA,d1,speed,1").unwrap();
    let s = bin()
        .args(["test", "--evals"])
        .arg(bad.path())
        .args(["--config", &data("bench/config.json")])
        .output()
        .unwrap();
    assert_eq!(s.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&s.stderr).contains("speed"));
}

#[test]
fn front_writes_dot_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("front.dot");
    let report = dir.path().join("report.json");
    let s = bin()
        .args(["front", "--evals", &data("bench/evals.csv"), "--config", &data("bench/config.json")])
        .args(["--epsilon", "0.01", "--dot"])
        .arg(&dot)
        .arg("--output")
        .arg(&report)
        .output()
        .unwrap();
    assert!(s.status.success(), "{}", String::from_utf8_lossy(&s.stderr));
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph"));
    assert!(text.contains("\"A\" [style=bold"));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["input"]["config"]["epsilon"], 0.01);
    assert!(r["result"].get("membership").is_none());
}
