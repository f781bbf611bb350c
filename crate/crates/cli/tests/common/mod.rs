#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn twotier(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twotier"))
        .args(args)
        .output()
        .expect("spawn twotier")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Writes the synthetic table into `dir` and returns its path.
pub fn synth(dir: &Path) -> PathBuf {
    let out = dir.join("synth.csv");
    let o = twotier(&["synth", "--out", path_str(&out)]);
    assert!(
        o.status.success(),
        "synth failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    out
}

/// Parses the `training score:` line printed by `fit`.
pub fn fit_score(data: &Path, features: &str) -> f64 {
    let o = twotier(&[
        "fit",
        "--input",
        path_str(data),
        "--target",
        "target",
        "--features",
        features,
    ]);
    assert!(
        o.status.success(),
        "fit failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("training score: "))
        .expect("score line")
        .trim()
        .parse()
        .expect("numeric score")
}

/// One parsed data row of a `summarize` table, keyed by column name.
pub fn summary_row(table: &str, dataset: &str) -> Vec<(String, String)> {
    let mut lines = table.lines();
    let header: Vec<&str> = lines.next().expect("header").split(',').collect();
    let row = lines
        .find(|l| l.split(',').next() == Some(dataset))
        .unwrap_or_else(|| panic!("no row for {dataset} in\n{table}"));
    header
        .iter()
        .map(|h| h.to_string())
        .zip(row.split(',').map(str::to_string))
        .collect()
}

pub fn field(row: &[(String, String)], name: &str) -> String {
    row.iter()
        .find(|(k, _)| k == name)
        .map(|(_, v)| v.clone())
        .expect("column")
}
