use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_means-lab"))
        .args(args)
        .env_remove("MEANS_LAB_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn ok(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    json(&out)
}

fn close(v: &Value, want: f64, tol: f64) {
    let got = v.as_f64().expect("number");
    assert!((got - want).abs() <= tol, "{got} vs {want}");
}

#[test]
fn eval_examples() {
    close(
        &ok(&[
            "eval", "--mean", "gini", "--q", "2", "--r", "1", "--points", "1,2,3",
        ])["value"],
        7.0 / 3.0,
        1e-14,
    );
    close(
        &ok(&["eval", "--mean", "holder", "--p", "0", "--points", "1,4"])["value"],
        2.0,
        1e-15,
    );
    close(
        &ok(&[
            "eval",
            "--mean",
            "deviation",
            "--generator",
            "power:3",
            "--weight",
            "const:1",
            "--points",
            "1,2",
        ])["value"],
        4.5f64.cbrt(),
        1e-12,
    );
    close(
        &ok(&[
            "eval",
            "--mean",
            "qa",
            "--generator",
            "log",
            "--points",
            "1,4",
        ])["value"],
        2.0,
        1e-14,
    );
    close(
        &ok(&[
            "eval",
            "--mean",
            "scale-split",
            "--generator",
            "identity",
            "--alpha",
            "1",
            "--beta",
            "3",
            "--points",
            "1,3",
        ])["value"],
        2.5,
        1e-12,
    );
}

#[test]
fn decide_examples() {
    let r = ok(&[
        "decide",
        "gini",
        "--q",
        "2",
        "--r",
        "3",
        "--interval",
        "1:2.9",
    ]);
    assert_eq!(r["verdict"], "convex");
    assert_eq!(r["case_label"], "case-(4)");
    assert_eq!(r["beta"].as_f64(), Some(3.0));
    assert_eq!(
        ok(&["decide", "holder", "--p", "0.5"])["verdict"],
        "not-convex"
    );
    assert_eq!(
        ok(&["decide", "qa", "--generator", "exp", "--interval", "0:5"])["verdict"],
        "convex"
    );
    assert_eq!(
        ok(&[
            "decide",
            "gini",
            "--q",
            "0.5",
            "--r",
            "0.6",
            "--two-variable"
        ])["verdict"],
        "convex"
    );
    assert_eq!(
        ok(&["decide", "gini", "--q", "0.5", "--r", "0.6"])["verdict"],
        "not-convex"
    );
    let split = ok(&[
        "decide",
        "scale-split",
        "--alpha",
        "2",
        "--beta",
        "1",
        "--interval",
        "0:10",
    ]);
    assert_eq!(split["verdict"], "not-convex");
    let cor = ok(&[
        "decide",
        "corollary",
        "--generator",
        "identity",
        "--alpha",
        "1",
        "--beta",
        "3",
    ]);
    assert_eq!(cor["verdict"], "convex");
}

#[test]
fn falsify_examples() {
    let r = ok(&[
        "falsify",
        "--mean",
        "gini",
        "--q",
        "2",
        "--r",
        "3",
        "--interval",
        "1:4",
        "--nvars",
        "2",
        "--budget",
        "100000",
        "--seed",
        "7",
    ]);
    assert_eq!(r["verdict"], "not-convex");
    assert!(r["witness"]["margin"].as_f64().unwrap() > 0.0);
    assert_eq!(r["seed"], 7);

    let r = ok(&[
        "falsify",
        "--mean",
        "holder",
        "--p",
        "2",
        "--interval",
        "0.1:10",
        "--budget",
        "100000",
        "--seed",
        "7",
    ]);
    assert_eq!(r["verdict"], "inconclusive");
    assert!(r["witness"].is_null());

    let r = ok(&[
        "falsify",
        "--mean",
        "scale-split",
        "--generator",
        "identity",
        "--alpha",
        "2",
        "--beta",
        "1",
        "--interval",
        "0:10",
        "--budget",
        "200000",
        "--seed",
        "7",
    ]);
    assert_eq!(r["verdict"], "not-convex");
}

#[test]
fn witness_replays_from_the_report() {
    let r = ok(&[
        "falsify",
        "--mean",
        "holder",
        "--p",
        "0.5",
        "--interval",
        "0.1:10",
        "--seed",
        "3",
    ]);
    let pts = |k: &str| -> Vec<f64> {
        r["witness"][k]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .collect()
    };
    let (x, y) = (pts("x"), pts("y"));
    let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| (a + b) / 2.0).collect();
    let m = |v: &[f64]| (v.iter().map(|t| t.sqrt()).sum::<f64>() / v.len() as f64).powi(2);
    assert!(m(&mid) - (m(&x) + m(&y)) / 2.0 > 1e-9);
}

#[test]
fn seed_from_env_and_flag_override() {
    let args = [
        "falsify",
        "--mean",
        "holder",
        "--p",
        "0.5",
        "--interval",
        "0.1:10",
    ];
    let env = Command::new(env!("CARGO_BIN_EXE_means-lab"))
        .args(args)
        .env("MEANS_LAB_SEED", "41")
        .output()
        .unwrap();
    assert_eq!(json(&env)["seed"], 41);
    let flag = Command::new(env!("CARGO_BIN_EXE_means-lab"))
        .args(args)
        .args(["--seed", "5"])
        .env("MEANS_LAB_SEED", "41")
        .output()
        .unwrap();
    assert_eq!(json(&flag)["seed"], 5);
    assert_eq!(ok(&args)["seed"], 0);
}

#[test]
fn crossval_writes_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let mut runs = Vec::new();
    for _ in 0..2 {
        let out = run(&[
            "crossval",
            "gini",
            "--q-grid",
            "-1:2:1",
            "--r-grid",
            "0:3:1.5",
            "--interval",
            "1:2",
            "--interval",
            "0.5:4",
            "--budget",
            "20000",
            "--seed",
            "11",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(out.stdout.is_empty());
        runs.push(std::fs::read(&path).unwrap());
    }
    let (a, b) = (&runs[0], &runs[1]);
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(a).unwrap();
    let cells = v["crossval"]["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 4 * 3 * 2);
    assert!(v["crossval"]["disagreements"]
        .as_array()
        .unwrap()
        .is_empty());
    assert!(v["elapsed_ms"].is_null());
}

#[test]
fn crossval_holder_and_empty_grid() {
    let r = ok(&[
        "crossval",
        "holder",
        "--p-grid",
        "-2:3:0.25",
        "--interval",
        "0.5:5",
        "--budget",
        "5000",
    ]);
    assert_eq!(r["crossval"]["cells"].as_array().unwrap().len(), 21);
    assert!(r["crossval"]["disagreements"]
        .as_array()
        .unwrap()
        .is_empty());
    let empty = ok(&[
        "crossval",
        "holder",
        "--p-grid",
        "3:1:1",
        "--interval",
        "0.5:5",
    ]);
    assert!(empty["crossval"]["cells"].as_array().unwrap().is_empty());
}

#[test]
fn disagreement_exits_one_and_still_reports() {
    // A single sample cannot find the counterexample the decision predicts.
    let out = run(&[
        "crossval",
        "gini",
        "--q-grid",
        "2",
        "--r-grid",
        "3",
        "--interval",
        "1:4",
        "--budget",
        "1",
        "--arities",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["crossval"]["disagreements"], serde_json::json!([0]));
}

#[test]
fn timing_is_opt_in() {
    let r = ok(&["decide", "holder", "--p", "2", "--timing"]);
    assert!(r["elapsed_ms"].is_u64());
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["eval", "--mean", "holder", "--points", "1,2"][..],
        &["eval", "--mean", "nope", "--points", "1"],
        &[
            "eval",
            "--mean",
            "qa",
            "--generator",
            "power:0",
            "--points",
            "1",
        ],
        &[
            "eval",
            "--mean",
            "qa",
            "--generator",
            "const:1",
            "--points",
            "1",
        ],
        &[
            "decide",
            "gini",
            "--q",
            "1",
            "--r",
            "2",
            "--interval",
            "2:1",
        ],
        &[
            "crossval",
            "gini",
            "--q-grid",
            "0:1:0",
            "--r-grid",
            "1",
            "--interval",
            "1:2",
        ],
        &[
            "falsify",
            "--mean",
            "holder",
            "--p",
            "1",
            "--interval",
            "1:2",
            "--budget",
            "0",
        ],
        &["frobnicate"],
    ] {
        let out = run(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn domain_errors_exit_three() {
    for args in [
        &["eval", "--mean", "holder", "--p", "2", "--points", "1,-2"][..],
        &[
            "eval",
            "--mean",
            "qa",
            "--generator",
            "log",
            "--points",
            "0,1",
        ],
        &[
            "eval",
            "--mean",
            "deviation",
            "--generator",
            "power:2",
            "--weight",
            "log",
            "--points",
            "0.5,3",
        ],
    ] {
        let out = run(args);
        assert_eq!(
            out.status.code(),
            Some(3),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(out.stdout.is_empty());
    }
}
