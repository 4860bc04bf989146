use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_featattr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--output", "json"]);
    let out = run(&all);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scores(report: &Value) -> Vec<String> {
    report["scores"][0]["scores"]["scores"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect()
}

#[test]
fn e1_waxp_scores_are_exact() {
    let e1 = fixture("e1.json");
    let r = json(&[
        "shap",
        "--model",
        &e1,
        "--instance",
        "1,1,2",
        "--game",
        "waxp",
    ]);
    assert_eq!(scores(&r), ["1", "0", "0"]);
    assert!(r["compliance"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn e1_expected_scores_flag_every_feature() {
    let e1 = fixture("e1.json");
    let r = json(&[
        "shap",
        "--model",
        &e1,
        "--instance",
        "1,1,2",
        "--game",
        "expected",
    ]);
    assert_eq!(scores(&r), ["0", "1/12", "-1/2"]);
    assert_eq!(r["compliance"]["violations"].as_array().unwrap().len(), 3);
}

#[test]
fn e3_expected_scores() {
    let e3 = fixture("e3.json");
    let r = json(&[
        "shap",
        "--model",
        &e3,
        "--instance",
        "1,1",
        "--delta",
        "1/5",
        "--game",
        "expected",
    ]);
    assert_eq!(scores(&r), ["0", "1/2"]);
}

#[test]
fn relevancy_of_e1_and_e2() {
    let r = json(&[
        "relevancy",
        "--model",
        &fixture("e1.json"),
        "--instance",
        "1,1,2",
    ]);
    assert_eq!(r["relevant"], serde_json::json!([1]));
    let r = json(&[
        "relevancy",
        "--model",
        &fixture("e2.json"),
        "--instance",
        "1,1",
        "--delta",
        "1/5",
    ]);
    assert_eq!(r["relevant"], serde_json::json!([1]));
}

#[test]
fn enumerate_both_kinds() {
    let e1 = fixture("e1.json");
    let r = json(&[
        "enumerate",
        "--kind",
        "cxp",
        "--model",
        &e1,
        "--instance",
        "0,1,1",
    ]);
    let cxps = r["explanations"]["sets"].clone();
    let r = json(&[
        "enumerate",
        "--kind",
        "axp",
        "--model",
        &e1,
        "--instance",
        "0,1,1",
    ]);
    assert_eq!(r["explanations"]["sets"], serde_json::json!([[1, 2, 3]]));
    assert_eq!(cxps, serde_json::json!([[1], [2], [3]]));
}

#[test]
fn compare_reports_batch_statistics() {
    let e1 = fixture("e1.json");
    let r = json(&[
        "compare",
        "--model",
        &e1,
        "--instance",
        "1,1,2",
        "--instance",
        "0,0,0",
    ]);
    assert_eq!(
        r["comparisons"][0]["comparison"]["pairs"][0]["signed"],
        "3/8"
    );
    let stats = &r["batch"]["pairs"][0]["signed"];
    for field in ["min", "max", "mean"] {
        assert!(stats[field].is_string(), "{field}");
    }
    assert_eq!(r["batch"]["instances"], 2);
}

#[test]
fn cgt_output_is_byte_identical_across_runs_and_threads() {
    let e1 = fixture("e1.json");
    let args = [
        "shap",
        "--model",
        &e1,
        "--instance",
        "1,1,2",
        "--method",
        "cgt",
        "--seed",
        "7",
        "--output",
        "json",
    ];
    let a = run(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_featattr"))
        .args(args)
        .env("FEATATTR_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(r["cgt"]["samples"], 958);
}

#[test]
fn table_output_uses_six_decimals() {
    let out = run(&[
        "shap",
        "--model",
        &fixture("e1.json"),
        "--instance",
        "1,1,2",
        "--game",
        "expected",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("0.083333"), "{text}");
    assert!(text.contains("-0.500000"), "{text}");
}

#[test]
fn validate_accepts_fixtures_and_rejects_bad_files() {
    for name in ["e1.json", "e1_tabular.json", "e2.json", "e3.json"] {
        assert_eq!(
            run(&["validate", "--model", &fixture(name)]).status.code(),
            Some(0),
            "{name}"
        );
    }
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let text = std::fs::read_to_string(fixture("e1_tabular.json"))
        .unwrap()
        .replace("\"default\": 1,", "");
    std::fs::write(&bad, text).unwrap();
    let bad = bad.to_string_lossy().into_owned();
    let v = run(&["validate", "--model", &bad]);
    assert_eq!(v.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&v.stderr).contains("not total"));
    // Every other subcommand rejects the same file the same way.
    assert_eq!(
        run(&["relevancy", "--model", &bad, "--instance", "1,1,2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn usage_and_input_errors_exit_2() {
    let e1 = fixture("e1.json");
    let e2 = fixture("e2.json");
    assert_eq!(run(&["shap", "--model", &e1]).status.code(), Some(2));
    assert_eq!(
        run(&["shap", "--model", &e1, "--instance", "1,1,7"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["shap", "--model", &e2, "--instance", "1,1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "shap",
            "--model",
            &e1,
            "--instance",
            "1,1,2",
            "--delta",
            "1"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        run(&["shap", "--model", &e1, "--instance", "1,1,2", "--agnostic"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["shap", "--model", "/nonexistent.json", "--instance", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn computation_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let sample = dir.path().join("s.csv");
    std::fs::write(&sample, "x1,x2,x3\n1,0,0\n1,1,1\n").unwrap();
    let sample = sample.to_string_lossy().into_owned();
    let e1 = fixture("e1.json");
    // Every sample row predicts 1, so no contrastive explanation exists.
    let out = run(&[
        "cxp",
        "--model",
        &e1,
        "--instance",
        "1,1,2",
        "--agnostic",
        "--sample",
        &sample,
    ]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn agnostic_full_sample_matches_model_aware() {
    let dir = tempfile::tempdir().unwrap();
    let sample = dir.path().join("full.tsv");
    let mut text = String::from("x1\tx2\tx3\n");
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..3 {
                text.push_str(&format!("{a}\t{b}\t{c}\n"));
            }
        }
    }
    std::fs::write(&sample, text).unwrap();
    let sample = sample.to_string_lossy().into_owned();
    let e1 = fixture("e1.json");
    let aware = json(&["shap", "--model", &e1, "--instance", "0,1,1"]);
    let agnostic = json(&[
        "shap",
        "--model",
        &e1,
        "--instance",
        "0,1,1",
        "--agnostic",
        "--sample",
        &sample,
    ]);
    assert_eq!(agnostic["problem"]["sample_rows"], 12);
    assert_eq!(scores(&aware), scores(&agnostic));
}

#[test]
fn timing_is_opt_in() {
    let e1 = fixture("e1.json");
    let plain = json(&["relevancy", "--model", &e1, "--instance", "1,1,2"]);
    assert!(plain.get("elapsed_ms").is_none());
    let timed = json(&[
        "relevancy",
        "--model",
        &e1,
        "--instance",
        "1,1,2",
        "--timing",
    ]);
    assert!(timed["elapsed_ms"].is_u64());
}

#[test]
fn validate_rejects_exactly_what_other_commands_reject() {
    let e1 = std::fs::read_to_string(fixture("e1.json")).unwrap();
    let e3 = std::fs::read_to_string(fixture("e3.json")).unwrap();
    let broken = [
        (
            "version",
            e1.replace("\"version\": 1", "\"version\": 9"),
            &["--instance", "1,1,2"][..],
        ),
        (
            "uncovered branch",
            e1.replace("\"values\": [0, 2]", "\"values\": [0]"),
            &["--instance", "1,1,2"][..],
        ),
        (
            "overlapping branch",
            e1.replace("\"values\": [0, 2]", "\"values\": [0, 1, 2]"),
            &["--instance", "1,1,2"][..],
        ),
        (
            "dangling child",
            e1.replace("\"child\": 7", "\"child\": 70"),
            &["--instance", "1,1,2"][..],
        ),
        (
            "constant tree",
            e1.replace("\"leaf\": 4", "\"leaf\": 1")
                .replace("\"leaf\": 7", "\"leaf\": 1")
                .replace("\"leaf\": 0", "\"leaf\": 1"),
            &["--instance", "1,1,2"][..],
        ),
        (
            "overlapping cells",
            e3.replace(
                "[\"1/2\", \"3/2\"], [\"-1/2\", \"3/2\"]",
                "[\"0\", \"3/2\"], [\"-1/2\", \"3/2\"]",
            ),
            &["--instance", "1,1", "--delta", "1/5"][..],
        ),
        (
            "gap between cells",
            e3.replace(
                "[\"1/2\", \"3/2\"], [\"-1/2\", \"3/2\"]",
                "[\"3/4\", \"3/2\"], [\"-1/2\", \"3/2\"]",
            ),
            &["--instance", "1,1", "--delta", "1/5"][..],
        ),
        (
            "bad rational",
            e3.replace("\"intercept\": -2", "\"intercept\": \"-2/0\""),
            &["--instance", "1,1", "--delta", "1/5"][..],
        ),
        ("not json", "{".to_string(), &["--instance", "1"][..]),
    ];
    let dir = tempfile::tempdir().unwrap();
    for (name, text, extra) in broken {
        assert_ne!(text, e1, "{name}: fixture edit did not apply");
        assert_ne!(text, e3, "{name}: fixture edit did not apply");
        let path = dir.path().join("m.json");
        std::fs::write(&path, &text).unwrap();
        let path = path.to_string_lossy().into_owned();
        assert_eq!(
            run(&["validate", "--model", &path]).status.code(),
            Some(2),
            "validate: {name}"
        );
        let mut args = vec!["shap", "--model", path.as_str()];
        args.extend_from_slice(extra);
        let shap = run(&args);
        assert_eq!(shap.status.code(), Some(2), "shap: {name}");
    }
}
