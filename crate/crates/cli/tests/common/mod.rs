#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub fn expresso() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_expresso"));
    cmd.env_remove("EXPRESSO_SEED");
    cmd
}

pub fn run(args: &[&str]) -> Output {
    expresso().args(args).output().expect("spawn expresso")
}

/// Runs and requires success, returning stdout.
pub fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "expresso {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 stdout")
}

pub fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Column `name` of a CSV table as strings, one per data row.
pub fn column(csv_text: &str, name: &str) -> Vec<String> {
    let mut lines = csv_text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().expect("header").split(',').collect();
    let i = header
        .iter()
        .position(|h| *h == name)
        .expect("column present");
    lines
        .map(|l| l.split(',').nth(i).unwrap().to_string())
        .collect()
}

/// Values of the trailing `# slope=..,intercept=..,r2=..` row.
pub fn fit_line(csv_text: &str) -> (f64, f64, f64) {
    let line = csv_text
        .lines()
        .find(|l| l.starts_with("# slope="))
        .expect("fit row");
    let vals: Vec<f64> = line[2..]
        .split(',')
        .map(|kv| kv.split('=').nth(1).unwrap().parse().unwrap())
        .collect();
    (vals[0], vals[1], vals[2])
}
