use std::path::PathBuf;
use std::process::{Command, Output};

use condquant::cli::parse_number;

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn condquant(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_condquant"))
        .args(args)
        .env_remove("CONDQUANT_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows (non-comment lines after the header) as columns.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split('\t').map(str::to_string).collect())
        .collect()
}

#[test]
fn compute_discrete_example_conditional() {
    let example = scenario("discrete_example.json");
    let out = condquant(&["compute", "--scenario", example.to_str().unwrap(), "--var", "X", "--sigma", "G", "--spec", "discrete"]);
    assert_eq!(out.status.code(), Some(0));
    let r = rows(&stdout(&out));
    assert_eq!(r, vec![vec!["w1", "1"], vec!["w2", "1"], vec!["w3", "3"]]);
    assert!(stdout(&out).contains("# spec: quantile(alpha=0.3333333333333333;u1=quadratic;u2=exp:1,1)"));
}

#[test]
fn compute_discrete_example_trivial_and_mean() {
    let example = scenario("discrete_example.json");
    let p = example.to_str().unwrap();
    let out = condquant(&["compute", "--scenario", p, "--var", "X", "--sigma", "trivial", "--spec", "discrete"]);
    let a = parse_number(&rows(&stdout(&out))[0][1]).unwrap();
    assert!((a - 1.594).abs() < 1e-3);
    assert!(((a - 1.0).exp() + 2.0 * a - 5.0).abs() < 1e-9);
    let out = condquant(&["compute", "--scenario", p, "--var", "X", "--sigma", "G", "--spec", "mean"]);
    let values: Vec<String> = rows(&stdout(&out)).into_iter().map(|r| r[1].clone()).collect();
    assert_eq!(values, ["1.5", "1.5", "3"]);
}

#[test]
fn compute_along_filtration() {
    let example = scenario("discrete_example.json");
    let out = condquant(&["compute", "--scenario", example.to_str().unwrap(), "--var", "X", "--filtration", "F", "--spec", "discrete"]);
    let r = rows(&stdout(&out));
    assert_eq!(r[0][0], "w1");
    assert_eq!(r[0].len(), 4);
    assert_eq!((r[0][2].as_str(), r[2][2].as_str()), ("1", "3"));
    assert_eq!(r[1][3], "2");
}

#[test]
fn oracle_prints_both_solvers() {
    let example = scenario("discrete_example.json");
    let out = condquant(&[
        "oracle", "--scenario", example.to_str().unwrap(), "--var", "X", "--sigma", "trivial", "--spec", "expectile_08", "--grid-step", "0.001",
    ]);
    assert_eq!(out.status.code(), Some(0));
    for row in rows(&stdout(&out)) {
        let diff = parse_number(&row[3]).unwrap();
        assert!(diff <= 0.001 + 1e-9, "{row:?}");
    }
}

#[test]
fn verify_equivalence_passes_on_discrete_example() {
    let example = scenario("discrete_example.json");
    let out = condquant(&["verify", "--scenario", example.to_str().unwrap(), "--suite", "equivalence", "--budget", "40"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("0 must-hold violations, 0 missing witnesses"));
}

#[test]
fn verify_consistency_reports_expectile_witness() {
    let example = scenario("discrete_example.json");
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = condquant(&[
        "verify", "--scenario", example.to_str().unwrap(), "--suite", "consistency", "--seed", "42", "--budget", "300",
        "--report", report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    let line = text.lines().find(|l| l.starts_with("expectile_08\ttower_property")).unwrap();
    assert!(line.contains("must_fail\tviolated"), "{line}");
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let entry = json["reports"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["spec"] == "expectile_08" && r["property"] == "tower_property")
        .unwrap();
    assert!(entry["witness"]["filtration"].is_array());
    assert!(entry["max_violation_magnitude"].as_f64().unwrap() > 1e-4);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let tree = scenario("binary_tree.json");
    let args = ["verify", "--scenario", tree.to_str().unwrap(), "--suite", "axioms", "--seed", "7", "--budget", "25"];
    let (a, b) = (condquant(&args), condquant(&args));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
}

#[test]
fn seed_comes_from_environment() {
    let tree = scenario("binary_tree.json");
    let p = tree.to_str().unwrap();
    let run_env = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_condquant"))
            .args(["verify", "--scenario", p, "--suite", "consistency", "--budget", "10"])
            .env("CONDQUANT_SEED", seed)
            .output()
            .unwrap()
    };
    assert!(stdout(&run_env("9")).contains("seed: 9;"));
    let flag = condquant(&["verify", "--scenario", p, "--suite", "consistency", "--budget", "10", "--seed", "9"]);
    assert_eq!(run_env("9").stdout, flag.stdout);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"outcomes": ["a", "b"], "probs": [1.0], "variables": {"X": [1, 2]}}"#).unwrap();
    let out = condquant(&["compute", "--scenario", bad.to_str().unwrap(), "--var", "X", "--sigma", "trivial", "--spec", "s"]);
    assert_eq!(out.status.code(), Some(65));

    let unknown = dir.path().join("unknown.json");
    std::fs::write(
        &unknown,
        r#"{"outcomes": ["a", "b"], "probs": [0.5, 0.5], "partitions": {"G": {"a": "x", "c": "y"}}}"#,
    )
    .unwrap();
    let out = condquant(&["verify", "--scenario", unknown.to_str().unwrap(), "--suite", "all"]);
    assert_eq!(out.status.code(), Some(65));

    let example = scenario("discrete_example.json");
    let out = condquant(&["verify", "--scenario", example.to_str().unwrap(), "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(64));
    let out = condquant(&["compute", "--scenario", example.to_str().unwrap(), "--var", "X", "--spec", "mean"]);
    assert_eq!(out.status.code(), Some(64));
    let out = condquant(&["compute", "--scenario", example.to_str().unwrap(), "--var", "Y", "--sigma", "G", "--spec", "mean"]);
    assert_eq!(out.status.code(), Some(65));
}

#[test]
fn missing_witness_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    std::fs::write(
        &path,
        r#"{"outcomes": ["a", "b"], "probs": [0.5, 0.5], "specs": {"e": {"kind": "expectile", "alpha": 0.8}}}"#,
    )
    .unwrap();
    let out = condquant(&["verify", "--scenario", path.to_str().unwrap(), "--suite", "consistency", "--budget", "1", "--seed", "3"]);
    let missing = stdout(&out).lines().any(|l| l.ends_with("NO-WITNESS"));
    assert_eq!(out.status.code(), Some(if missing { 2 } else { 0 }));
}
