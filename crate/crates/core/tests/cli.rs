use std::path::Path;
use std::process::{Command, Output};

use treerep::report::report_body;

fn treerep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treerep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn value<'a>(report: &'a str, key: &str) -> Option<&'a str> {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|rest| rest.strip_prefix('=')))
}

#[test]
fn subset_lemma_passes() {
    let out = treerep(&["verify", "subset-lemma", "--n-max", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(value(&text, "counterexamples"), Some("0"));
    assert_eq!(value(&text, "config.seed"), Some("0"));
}

#[test]
fn support_fill_residuals_within_rate() {
    let out = treerep(&["--p", "1/3,2/3", "verify", "support-fill", "--steps", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert_eq!(value(&stdout(&out), "check.rate"), Some("pass"));
}

#[test]
fn gamma_decay_swap_case_reports_equality() {
    let out = treerep(&["verify", "gamma-decay", "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(value(&stdout(&out), "swap.equality"), Some("true"));
}

#[test]
fn koopman_matrix_export_for_uniform_measure() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = treerep(&[
        "--p", "1/2,1/2", "--level", "3", "--out", out_dir,
        "export", "koopman-matrix", "--element", "a", "--basis", "raw",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("koopman_n3.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 8);
    for row in &rows {
        assert_eq!(row.len(), 8);
        assert_eq!(row.iter().filter(|&&x| x == 1.0).count(), 1);
        assert_eq!(row.iter().filter(|&&x| x == 0.0).count(), 7);
    }
    assert!(dir.path().join("export-koopman-matrix.report").exists());
    assert!(dir.path().join("export-koopman-matrix.json").exists());
}

#[test]
fn schreier_dot_has_nine_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let out = treerep(&[
        "--group", "odometer2", "--out", dir.path().to_str().unwrap(),
        "export", "schreier-dot", "--x", "(0)", "--radius", "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let dot = std::fs::read_to_string(dir.path().join("schreier_r4.dot")).unwrap();
    assert!(dot.starts_with("digraph"));
    let nodes = dot.lines().filter(|l| l.contains("[label=") && !l.contains("->")).count();
    assert_eq!(nodes, 9);
    assert_eq!(value(&stdout(&out), "nodes"), Some("9"));
}

#[test]
fn hellinger_table_decays() {
    let dir = tempfile::tempdir().unwrap();
    let out = treerep(&["--out", dir.path().to_str().unwrap(), "export", "tables", "--q", "2/3,1/3"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("hellinger.csv")).unwrap();
    let last = csv.lines().last().unwrap();
    let (n, value) = last.split_once(',').unwrap();
    assert_eq!(n, "100");
    let value: f64 = value.parse().unwrap();
    assert!((value - 2.8e-3).abs() < 1e-4);
}

#[test]
fn group_info_tables() {
    let out = treerep(&["--group", "odometer2", "--level", "5", "group-info"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for n in 1..=5 {
        assert_eq!(value(&text, &format!("level.{n}.orbits")), Some("1"));
        assert_eq!(value(&text, &format!("level.{n}.quotient_order")), Some((1usize << n).to_string().as_str()));
    }
    let out = treerep(&["--group", "grigorchuk", "group-info"]);
    let text = stdout(&out);
    assert!((1..=5).all(|n| value(&text, &format!("level.{n}.transitive")) == Some("true")));
    assert_eq!(value(&text, "activity.b"), Some("1,2,2,1,2,2"));
}

#[test]
fn empty_generating_set_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("empty.aut");
    std::fs::write(&spec, "degree = 2\n").unwrap();
    let out = treerep(&["--spec", spec.to_str().unwrap(), "group-info"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(treerep(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(treerep(&["--group", "nope", "group-info"]).status.code(), Some(2));
    assert_eq!(treerep(&["--p", "1/2,1/3", "group-info"]).status.code(), Some(2));
    assert_eq!(treerep(&["--p", "1/2,1/2", "verify", "gamma-decay"]).status.code(), Some(2));
    assert_eq!(treerep(&["verify", "subset-lemma", "--n-max", "9"]).status.code(), Some(2));
}

#[test]
fn exhausted_budget_exits_with_three() {
    let out = treerep(&["--budget", "1", "verify", "orbit-witness"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(value(&stdout(&out), "status"), Some("error"));
}

#[test]
fn failed_assertion_exits_with_one() {
    let out = treerep(&["verify", "centralizer"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(value(&stdout(&out), "last_letter_flip_in_centralizer"), Some("true"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, r#"{"group": "odometer2", "level": 3, "seed": 11}"#).unwrap();
    let c = config.to_str().unwrap();
    let out = treerep(&["--config", c, "group-info"]);
    let text = stdout(&out);
    assert_eq!(value(&text, "config.group"), Some("odometer2"));
    assert_eq!(value(&text, "config.seed"), Some("11"));
    let out = treerep(&["--config", c, "--seed", "5", "--group", "grigorchuk", "group-info"]);
    let text = stdout(&out);
    assert_eq!(value(&text, "config.group"), Some("grigorchuk"));
    assert_eq!(value(&text, "config.seed"), Some("5"));
    std::fs::write(&config, r#"{"colour": "blue"}"#).unwrap();
    assert_eq!(treerep(&["--config", c, "group-info"]).status.code(), Some(2));
}

fn body_of(path: &Path) -> String {
    report_body(&std::fs::read_to_string(path).unwrap()).to_string()
}

#[test]
fn repeated_runs_are_byte_identical() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    for dir in [&first, &second] {
        let out = treerep(&[
            "--seed", "3", "--level", "3", "--out", dir.path().to_str().unwrap(),
            "verify", "koopman", "--samples", "8",
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let a = body_of(&first.path().join("koopman.report"));
    let b = body_of(&second.path().join("koopman.report"));
    assert_eq!(a, b);
    assert!(a.contains("config.seed=3"));
}
