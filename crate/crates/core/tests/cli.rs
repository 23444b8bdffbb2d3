use std::path::PathBuf;

use pdim::cli::{run_with, CSV_HEADER};

fn config(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples/configs")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (i32, String) {
    let mut buf = Vec::new();
    let code = run_with(std::iter::once("pdim").chain(args.iter().copied()), &mut buf);
    (code, String::from_utf8(buf).unwrap())
}

#[test]
fn estimate_drift_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, text) = run(&["estimate", "--config", &config("fullshift_drift.json"), "--out", out]);
    assert_eq!(code, 0, "{text}");
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    let line = summary
        .lines()
        .skip_while(|l| !l.starts_with("estimator 2"))
        .find(|l| l.contains("s = 1:"))
        .unwrap();
    let v: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!((v - 1.1931).abs() < 1e-4, "{line}");
    assert!(summary.contains("window n = 33..=64"));

    let mut rdr = csv::Reader::from_path(dir.path().join("results.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2 * 64 * 3);
    assert!(rows.iter().all(|r| &r[8] == "true"));
}

#[test]
fn zero_potential_estimators_agree() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(&[
        "estimate",
        "--config",
        &config("fullshift_zero.json"),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_path(dir.path().join("results.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    let pick = |e: &str| -> Vec<String> {
        rows.iter()
            .filter(|r| &r[2] == e && &r[5] == "1")
            .map(|r| r[6].to_string())
            .collect()
    };
    assert_eq!(pick("2"), pick("3"));
    assert_eq!(pick("2").len(), 200);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"system": {"type": "doubling"}, "potential": {"type": "zero"}, "estimators": [],
            "n_range": {"min": 1, "max": 4}, "scales": [{"eps": 0.1}]}"#,
    )
    .unwrap();
    assert_eq!(run(&["estimate", "--config", bad.to_str().unwrap()]).0, 2);
    assert_eq!(run(&["estimate", "--config", "/nonexistent.json"]).0, 2);
    assert_eq!(run(&["verify", "nosuch"]).0, 2);
    assert_eq!(
        run(&[
            "sweep",
            "--config",
            &config("fullshift_zero.json"),
            "--s-min",
            "2",
            "--s-max",
            "1",
            "--steps",
            "4"
        ])
        .0,
        2
    );
    assert_eq!(run(&["oracle", "--max-points", "21"]).0, 2);
}

#[test]
fn budget_overrun_keeps_partial_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(&[
        "estimate",
        "--config",
        &config("doubling_budget.json"),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 3);
    let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert!(csv.lines().last().unwrap().ends_with("truncated"));
    assert!(csv.lines().count() > 2);
}

#[test]
fn verify_reports_and_fails_on_injected_fault() {
    let (code, text) = run(&["verify", "--suite", "chain", "--seed", "7"]);
    assert_eq!(code, 0);
    assert!(text.starts_with("chain pass worst_violation=0 "), "{text}");
    let (code, text) = run(&["verify", "--suite", "chain", "--seed", "7", "--inject", "1"]);
    assert_eq!(code, 1);
    assert!(text.contains("chain fail"));
}

#[test]
fn sweep_brackets() {
    let (code, text) = run(&[
        "sweep",
        "--config",
        &config("fullshift_zero.json"),
        "--s-min",
        "0.5",
        "--s-max",
        "2.0",
        "--steps",
        "16",
    ]);
    assert_eq!(code, 0);
    for line in text.lines().filter(|l| l.contains("bracket")) {
        let inner = &line[line.find('(').unwrap() + 1..line.find(')').unwrap()];
        let (lo, hi) = inner.split_once(", ").unwrap();
        let (lo, hi): (f64, f64) = (lo.parse().unwrap(), hi.parse().unwrap());
        assert!(lo < 1.0 && hi > 1.0, "{line}");
    }
    let (code, text) = run(&[
        "sweep",
        "--config",
        &config("fullshift_drift.json"),
        "--s-min",
        "0.5",
        "--s-max",
        "2.0",
        "--steps",
        "16",
    ]);
    assert_eq!(code, 0);
    assert!(text.contains("bracket (0.9, 1.1)"));
}

#[test]
fn oracle_command() {
    let (code, a) = run(&["oracle", "--seed", "3"]);
    assert_eq!(code, 0);
    assert!(a.contains("sandwich pass"));
    assert_eq!(a, run(&["oracle", "--seed", "3"]).1);
    let (code, one) = run(&["oracle", "--max-points", "1", "--trials", "30"]);
    assert_eq!(code, 0);
    assert!(one.contains("greedy exact on 30 of 30 trials"));
}
