mod common;

use std::fs;

use common::{column, fit_line, ok, run, s};

const STRAIGHT: &str = "drawing straight\nldiv 2\ncontent setup\npolyline\n0 0\n100 0\nend\n";

#[test]
fn straight_segment_aspect_a() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("straight.drw");
    fs::write(&f, STRAIGHT).unwrap();
    let out = ok(&["--format", "csv", "analyze", s(&f)]);
    assert_eq!(out.lines().count(), 2);
    let a: f64 = column(&out, "a")[0].parse().unwrap();
    assert!((a - 0.02).abs() < 1e-12, "a = {a}");
    assert_eq!(column(&out, "n_ends_bends"), ["2"]);
    assert_eq!(column(&out, "lseg"), ["100"]);
}

#[test]
fn unreadable_file_exits_2_and_names_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nowhere.drw");
    let out = run(&["analyze", s(&missing)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(s(&missing)));
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_file_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.drw");
    fs::write(
        &f,
        "drawing bad\nldiv -1\ncontent both\npolyline\n0 0\n1 0\nend\n",
    )
    .unwrap();
    let out = run(&["analyze", s(&f)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.drw") && err.contains("line 2"), "{err}");
}

#[test]
fn usage_error_exits_2() {
    assert_eq!(run(&["analyze"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn csv_over_thirty_files_has_thirty_one_lines() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c");
    ok(&[
        "gen-corpus",
        "--seed",
        "4",
        "--count",
        "30",
        "--out",
        s(&corpus),
    ]);
    let out = ok(&["--format", "csv", "analyze", s(&corpus)]);
    assert_eq!(out.lines().count(), 31);
    let ids = column(&out, "id");
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
}

#[test]
fn json_lines_has_one_object_per_drawing() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c");
    ok(&[
        "gen-corpus",
        "--seed",
        "2",
        "--count",
        "5",
        "--out",
        s(&corpus),
    ]);
    let out = ok(&["--format", "json-lines", "analyze", s(&corpus)]);
    let rows: Vec<serde_json::Value> = out
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0]["id"], "d000");
    assert!(rows[0]["v12"].as_f64().unwrap() > 0.0);
}

#[test]
fn analysis_leaves_inputs_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c");
    ok(&[
        "gen-corpus",
        "--seed",
        "6",
        "--count",
        "5",
        "--out",
        s(&corpus),
    ]);
    let before = fs::read(corpus.join("d000.drw")).unwrap();
    ok(&["analyze", s(&corpus)]);
    ok(&["correlate", s(&corpus)]);
    assert_eq!(fs::read(corpus.join("d000.drw")).unwrap(), before);
}

#[test]
fn seed_from_environment_and_flag_wins() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let gen = |name: &str, env: Option<&str>, flag: Option<&str>| {
        let mut cmd = common::expresso();
        if let Some(e) = env {
            cmd.env("EXPRESSO_SEED", e);
        }
        let out_dir = p.join(name);
        cmd.args(["gen-corpus", "--count", "3", "--out", s(&out_dir)]);
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        assert!(cmd.status().unwrap().success());
        fs::read(out_dir.join("d000.drw")).unwrap()
    };
    let seven = gen("flag7", None, Some("7"));
    assert_eq!(gen("env7", Some("7"), None), seven);
    assert_eq!(gen("both", Some("8"), Some("7")), seven);
    assert_ne!(gen("env8", Some("8"), None), seven);
}

#[test]
fn manifest_marks_injected_drawings() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c");
    ok(&[
        "gen-corpus",
        "--seed",
        "3",
        "--count",
        "12",
        "--inject-extremes",
        "2",
        "--out",
        s(&corpus),
    ]);
    let manifest = fs::read_to_string(corpus.join("manifest.csv")).unwrap();
    assert_eq!(manifest.lines().count(), 1 + 12 + 4);
    let tags: Vec<String> = column(&manifest, "injected")
        .into_iter()
        .filter(|t| !t.is_empty())
        .collect();
    assert_eq!(tags, ["a_high", "a_low", "b_high", "b_low"]);
    assert_eq!(fs::read_dir(&corpus).unwrap().count(), 16 + 1);
}

#[test]
fn infeasible_spec_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c");
    let out = run(&[
        "gen-corpus",
        "--trend-mode",
        "--min-crossings",
        "1",
        "--out",
        s(&corpus),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!corpus.exists());
    let out = run(&[
        "gen-corpus",
        "--count",
        "5",
        "--inject-extremes",
        "1",
        "--out",
        s(&corpus),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!corpus.exists());
}

#[test]
fn perceptron_round_trip_and_aspect_a_identity() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c");
    let model = dir.path().join("m.txt");
    ok(&[
        "gen-corpus",
        "--seed",
        "9",
        "--count",
        "8",
        "--out",
        s(&corpus),
    ]);
    let summary = ok(&[
        "--format",
        "csv",
        "train-perceptron",
        "--learning-set",
        s(&corpus),
        "--epochs",
        "50",
        "--out",
        s(&model),
    ]);
    assert_eq!(column(&summary, "epochs"), ["50"]);
    assert!(fs::read_to_string(&model)
        .unwrap()
        .starts_with("perceptron 12 5 5"));

    let plot = ok(&[
        "plot-data",
        "--model",
        s(&model),
        "--dir",
        s(&corpus),
        "--aspect",
        "a",
    ]);
    assert!(plot.starts_with("id,hand,predicted\n"));
    assert_eq!(column(&plot, "hand"), column(&plot, "predicted"));
    let (slope, intercept, r2) = fit_line(&plot);
    assert!((slope - 1.0).abs() < 1e-9 && intercept.abs() < 1e-9 && (r2 - 1.0).abs() < 1e-9);

    let pred = ok(&[
        "--format",
        "csv",
        "predict",
        "--model",
        s(&model),
        s(&corpus.join("d000.drw")),
    ]);
    let analysis = ok(&["--format", "csv", "analyze", s(&corpus.join("d000.drw"))]);
    assert_eq!(column(&pred, "P(a)"), column(&analysis, "a"));
    for t in ["t1", "t2", "t3", "t4", "t5"] {
        let v: f64 = column(&pred, t)[0].parse().unwrap();
        assert!(v > 0.0 && v < 1.0);
    }
}

#[test]
fn svm_train_score_and_aspect_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c");
    let model = dir.path().join("s.txt");
    ok(&[
        "gen-corpus",
        "--seed",
        "5",
        "--count",
        "10",
        "--out",
        s(&corpus),
    ]);
    let weights = ok(&[
        "--format",
        "csv",
        "train-svm",
        "--learning-set",
        s(&corpus),
        "--aspect",
        "b",
        "--C",
        "1",
        "--out",
        s(&model),
    ]);
    assert_eq!(weights.lines().count(), 1 + 12 + 1);
    assert!(fs::read_to_string(&model).unwrap().starts_with("svm b "));

    let scores = ok(&[
        "--format",
        "csv",
        "svm-score",
        "--model",
        s(&model),
        s(&corpus),
    ]);
    for (d, c) in column(&scores, "decision")
        .iter()
        .zip(column(&scores, "class"))
    {
        let d: f64 = d.parse().unwrap();
        assert_eq!(c, if d > 0.0 { "+1" } else { "-1" });
    }

    let plot = ok(&[
        "plot-data",
        "--model",
        s(&model),
        "--dir",
        s(&corpus),
        "--aspect",
        "b",
    ]);
    assert_eq!(column(&plot, "predicted"), column(&scores, "decision"));

    let bad = run(&[
        "plot-data",
        "--model",
        s(&model),
        "--dir",
        s(&corpus),
        "--aspect",
        "c",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("aspect b"));

    let wrong = run(&["predict", "--model", s(&model), s(&corpus)]);
    assert_eq!(wrong.status.code(), Some(1));
}

#[test]
fn model_file_with_unknown_header_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("m.txt");
    fs::write(&f, "forest 3\n").unwrap();
    let d = dir.path().join("x.drw");
    fs::write(&d, STRAIGHT).unwrap();
    assert_eq!(
        run(&["predict", "--model", s(&f), s(&d)]).status.code(),
        Some(2)
    );
}

#[test]
fn correlate_reports_undefined_for_constant_series() {
    let dir = tempfile::tempdir().unwrap();
    for i in 0..5 {
        let text = STRAIGHT
            .replace("straight", &format!("s{i}"))
            .replace("100 0", &format!("{} 0", 50 + 10 * i));
        fs::write(dir.path().join(format!("s{i}.drw")), text).unwrap();
    }
    let out = ok(&["--format", "csv", "correlate", s(dir.path())]);
    assert!(out.starts_with("pair,rho,n\n"));
    assert_eq!(out.lines().count(), 10);
    let rhos = column(&out, "rho");
    assert!(rhos.iter().any(|r| r == "undefined"));
    assert!(column(&out, "n").iter().all(|n| n == "5"));
}

#[test]
fn correlate_needs_five_drawings() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.drw"), STRAIGHT).unwrap();
    assert_eq!(run(&["correlate", s(dir.path())]).status.code(), Some(1));
}
