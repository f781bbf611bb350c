//! Datasets, CSV ingestion, the synthetic interference table and seeded
//! train/test partitions.

use std::collections::HashSet;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Regression,
    Classification,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Task::Regression => f.write_str("regression"),
            Task::Classification => f.write_str("classification"),
        }
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regression" | "r" => Ok(Task::Regression),
            "classification" | "c" => Ok(Task::Classification),
            other => Err(Error::InvalidArgument(format!("unknown task `{other}`"))),
        }
    }
}

/// Named numeric feature columns plus a target.
///
/// Columns are stored column-major. For classification the target holds
/// integer labels (as `f64`) and the dataset keeps a dense class encoding
/// so the tree code can count classes by index.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    target: Vec<f64>,
    task: Task,
    classes: Vec<f64>,
    codes: Vec<usize>,
}

impl Dataset {
    pub fn new(
        names: Vec<String>,
        columns: Vec<Vec<f64>>,
        target: Vec<f64>,
        task: Task,
    ) -> Result<Self> {
        let n = target.len();
        if n < 2 {
            return Err(Error::TooFewRows {
                needed: 2,
                found: n,
            });
        }
        if names.len() != columns.len() {
            return Err(Error::InvalidArgument(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateColumn(name.clone()));
            }
        }
        for (name, col) in names.iter().zip(&columns) {
            if col.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "column `{name}` has {} values, target has {n}",
                    col.len()
                )));
            }
        }

        let (classes, codes) = match task {
            Task::Regression => (Vec::new(), Vec::new()),
            Task::Classification => encode_classes(&target)?,
        };

        Ok(Dataset {
            names,
            columns,
            target,
            task,
            classes,
            codes,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.target.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn feature_names(&self) -> &[String] {
        &self.names
    }

    pub fn feature_name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn feature_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownFeature(name.to_string()))
    }

    pub fn column(&self, index: usize) -> &[f64] {
        &self.columns[index]
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    /// Sorted distinct class labels (empty for regression).
    pub fn classes(&self) -> &[f64] {
        &self.classes
    }

    /// Per-row index into [`Dataset::classes`] (empty for regression).
    pub fn class_codes(&self) -> &[usize] {
        &self.codes
    }

    /// Feature values of one row, in column order.
    pub fn row(&self, index: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[index]).collect()
    }

    fn select_rows(&self, rows: &[usize]) -> Result<Dataset> {
        let columns = self
            .columns
            .iter()
            .map(|c| rows.iter().map(|&r| c[r]).collect())
            .collect();
        let target = rows.iter().map(|&r| self.target[r]).collect();
        Dataset::new(self.names.clone(), columns, target, self.task)
    }
}

fn encode_classes(target: &[f64]) -> Result<(Vec<f64>, Vec<usize>)> {
    for (row, &v) in target.iter().enumerate() {
        if !v.is_finite() || v.fract() != 0.0 {
            return Err(Error::NonIntegerLabel { row, value: v });
        }
    }
    let mut classes = target.to_vec();
    classes.sort_by(f64::total_cmp);
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::DegenerateTarget(
            "classification target has a single class".into(),
        ));
    }
    let codes = target
        .iter()
        .map(|v| classes.partition_point(|c| c < v))
        .collect();
    Ok((classes, codes))
}

/// Reads a comma-separated numeric table with a header row.
///
/// Quoting is not recognised. The target column is removed from the
/// features; the remaining columns keep their file order.
pub fn load_csv(path: impl AsRef<Path>, target_name: &str, task: Task) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .quoting(false)
        .flexible(true)
        .from_reader(file);

    let header: Vec<String> = reader
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let target_col = header
        .iter()
        .position(|h| h == target_name)
        .ok_or_else(|| Error::MissingTarget(target_name.to_string()))?;

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        // 1-based line number in the file; the header is line 1.
        let line = i + 2;
        if record.len() == 1 && record[0].trim().is_empty() {
            continue;
        }
        if record.len() != header.len() {
            return Err(Error::RaggedRow {
                row: line,
                expected: header.len(),
                found: record.len(),
            });
        }
        for (j, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            let value = cell.parse::<f64>().map_err(|_| Error::NonNumeric {
                row: line,
                column: header[j].clone(),
                value: cell.to_string(),
            })?;
            columns[j].push(value);
        }
    }

    let target = columns.remove(target_col);
    let mut names = header;
    names.remove(target_col);
    Dataset::new(names, columns, target, task)
}

/// Writes `d` in the format [`load_csv`] reads, target last.
///
/// Values use Rust's shortest round-trip float formatting, so a reload
/// reproduces every value bit for bit.
pub fn write_csv(d: &Dataset, target_name: &str, mut out: impl Write) -> std::io::Result<()> {
    let mut header: Vec<&str> = d.names.iter().map(String::as_str).collect();
    header.push(target_name);
    writeln!(out, "{}", header.join(","))?;
    for r in 0..d.n_rows() {
        let mut line = String::new();
        for c in &d.columns {
            line.push_str(&format!("{:?},", c[r]));
        }
        line.push_str(&format!("{:?}", d.target[r]));
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn write_csv_file(d: &Dataset, target_name: &str, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut out = std::io::BufWriter::new(file);
    write_csv(d, target_name, &mut out).map_err(io_err)?;
    out.flush().map_err(io_err)
}

/// Name of the target column in the synthetic table.
pub const SYNTHETIC_TARGET: &str = "target";

/// The 20-row, three-feature regression table in which `s` overshadows the
/// complementary pair `f1`, `f2` for a greedy depth-2 tree.
///
/// Rows come in blocks of four sharing one `s` level (0, 7, ..., 28). Inside
/// a block the target is high when `f1 == f2` and low otherwise, and every
/// block shifts both levels down by 4.
pub fn emit_synthetic() -> Dataset {
    let mut f1 = Vec::with_capacity(20);
    let mut f2 = Vec::with_capacity(20);
    let mut s = Vec::with_capacity(20);
    let mut target = Vec::with_capacity(20);
    for block in 0..5 {
        let level = 7.0 * block as f64;
        let shift = 4.0 * block as f64;
        for (a, b) in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
            f1.push(a);
            f2.push(b);
            s.push(level);
            target.push(if a == b { 100.0 - shift } else { 20.0 - shift });
        }
    }
    Dataset::new(
        vec!["f1".into(), "f2".into(), "s".into()],
        vec![f1, f2, s],
        target,
        Task::Regression,
    )
    .expect("synthetic table is well formed")
}

/// Keeps the rows with `lo <= value < hi` on `feature`, preserving order.
pub fn filter_rows(d: &Dataset, feature: &str, lo: f64, hi: f64) -> Result<Dataset> {
    let col = d.column(d.feature_index(feature)?);
    let rows: Vec<usize> = (0..d.n_rows())
        .filter(|&r| lo <= col[r] && col[r] < hi)
        .collect();
    if rows.len() < 2 {
        return Err(Error::TooFewRows {
            needed: 2,
            found: rows.len(),
        });
    }
    d.select_rows(&rows)
}

/// SplitMix64: 64-bit state advanced by the golden-gamma constant and
/// finalised with two xor-shift-multiply rounds.
///
/// It is small enough to port verbatim, which keeps seeded partitions
/// identical across platforms and language bindings.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform integer in `0..bound` by rejection of the biased low zone.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return r % bound;
            }
        }
    }

    /// Fisher-Yates, walking from the last position down to 1.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// One seeded train/test partition of the rows `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

impl SplitPlan {
    /// Train and test both equal to every row: in-sample evaluation.
    pub fn resubstitution(n: usize) -> Self {
        SplitPlan {
            train: (0..n).collect(),
            test: (0..n).collect(),
            seed: 0,
        }
    }
}

/// Shuffles `0..n` with [`SplitMix64`] seeded by `seed` and cuts the
/// permutation at `round(train_fraction * n)`. Both parts are returned
/// sorted.
pub fn make_split(n: usize, train_fraction: f64, seed: u64) -> Result<SplitPlan> {
    if n < 4 {
        return Err(Error::TooFewRows {
            needed: 4,
            found: n,
        });
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train fraction {train_fraction} outside (0, 1)"
        )));
    }
    let cut = (train_fraction * n as f64).round() as usize;
    if cut == 0 || cut >= n {
        return Err(Error::InvalidArgument(format!(
            "train fraction {train_fraction} leaves an empty part of {n} rows"
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    SplitMix64::new(seed).shuffle(&mut perm);
    let mut train = perm[..cut].to_vec();
    let mut test = perm[cut..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitPlan { train, test, seed })
}
