//! Greedy depth-2 CART.
//!
//! Candidate thresholds are midpoints between consecutive distinct values
//! of a feature on the node's rows. Regression splits maximise the drop in
//! summed squared error, classification splits the drop in count-weighted
//! Gini impurity. Ties go to the lowest feature index, then the lowest
//! threshold.
//!
//! An impure node is always split when at least one candidate exists, even
//! if the best candidate leaves impurity unchanged. The synthetic table
//! depends on this: neither `f1` nor `f2` reduces variance at the root, yet
//! splitting on one of them is what lets the second tier find the other.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Task};
use crate::error::{Error, Result};

/// Sorted, duplicate-free set of feature column indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FeatureSubset(Vec<usize>);

impl FeatureSubset {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if v.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok(FeatureSubset(v))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.binary_search(&index).is_ok()
    }

    /// Feature names joined with `+`, e.g. `f1+f2+s`.
    pub fn label(&self, d: &Dataset) -> String {
        self.0
            .iter()
            .map(|&i| d.feature_name(i))
            .collect::<Vec<_>>()
            .join("+")
    }

    fn check(&self, d: &Dataset) -> Result<()> {
        match self.0.last() {
            Some(&i) if i >= d.n_features() => Err(Error::FeatureOutOfRange {
                index: i,
                count: d.n_features(),
            }),
            _ => Ok(()),
        }
    }
}

/// Rows with `value <= threshold` go left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
}

impl Split {
    pub fn goes_left(&self, value: f64) -> bool {
        value <= self.threshold
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        /// Mean target (regression) or class label (classification).
        value: f64,
        n_samples: usize,
    },
    Internal {
        split: Split,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Internal { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    /// Splits in pre-order (node, left subtree, right subtree).
    pub fn splits(&self) -> Vec<Split> {
        let mut out = Vec::new();
        self.collect_splits(&mut out);
        out
    }

    fn collect_splits(&self, out: &mut Vec<Split>) {
        if let Node::Internal { split, left, right } = self {
            out.push(*split);
            left.collect_splits(out);
            right.collect_splits(out);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoTierTree {
    pub root: Node,
    pub subset: FeatureSubset,
}

impl TwoTierTree {
    /// `row` holds one value per dataset column, in column order.
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { value, .. } => return *value,
                Node::Internal { split, left, right } => {
                    node = if split.goes_left(row[split.feature]) {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    /// Prediction for row `r` of `d` without materialising the row.
    pub fn predict(&self, d: &Dataset, r: usize) -> f64 {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { value, .. } => return *value,
                Node::Internal { split, left, right } => {
                    node = if split.goes_left(d.column(split.feature)[r]) {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    /// Indented text form, one line per branch and leaf.
    pub fn render(&self, names: &[String]) -> String {
        let mut out = String::new();
        render_node(&self.root, names, 0, &mut out).expect("writing to a String");
        out
    }
}

fn render_node(node: &Node, names: &[String], depth: usize, out: &mut String) -> fmt::Result {
    let pad = "|   ".repeat(depth);
    match node {
        Node::Leaf { value, n_samples } => {
            writeln!(out, "{pad}|--- value: {value} (n={n_samples})")
        }
        Node::Internal { split, left, right } => {
            let name = &names[split.feature];
            writeln!(out, "{pad}|--- {name} <= {}", split.threshold)?;
            render_node(left, names, depth + 1, out)?;
            writeln!(out, "{pad}|--- {name} >  {}", split.threshold)?;
            render_node(right, names, depth + 1, out)
        }
    }
}

/// Best split of `rows` over the `allowed` features, or `None` when the
/// rows are pure, fewer than two, or constant on every allowed feature.
pub fn best_split(rows: &[usize], d: &Dataset, allowed: &FeatureSubset) -> Option<Split> {
    if rows.len() < 2 || is_pure(d, rows) {
        return None;
    }
    match d.task() {
        Task::Regression => best_regression_split(rows, d, allowed),
        Task::Classification => best_gini_split(rows, d, allowed),
    }
}

fn is_pure(d: &Dataset, rows: &[usize]) -> bool {
    match d.task() {
        Task::Regression => {
            let y = d.target();
            rows.iter().all(|&r| y[r] == y[rows[0]])
        }
        Task::Classification => {
            let c = d.class_codes();
            rows.iter().all(|&r| c[r] == c[rows[0]])
        }
    }
}

/// Rows of `rows` ordered by feature value, ties by row index.
fn sorted_by_feature(rows: &[usize], col: &[f64], buf: &mut Vec<usize>) {
    buf.clear();
    buf.extend_from_slice(rows);
    buf.sort_unstable_by(|&a, &b| col[a].total_cmp(&col[b]).then(a.cmp(&b)));
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a / 2.0 + b / 2.0;
    if m > a && m < b {
        m
    } else {
        a
    }
}

struct Best {
    gain: f64,
    split: Split,
}

impl Best {
    fn offer(slot: &mut Option<Best>, gain: f64, split: Split, tol: f64) {
        match slot {
            Some(b) if gain <= b.gain + tol => {}
            _ => *slot = Some(Best { gain, split }),
        }
    }
}

fn best_regression_split(rows: &[usize], d: &Dataset, allowed: &FeatureSubset) -> Option<Split> {
    let y = d.target();
    let n = rows.len() as f64;
    let mean = rows.iter().map(|&r| y[r]).sum::<f64>() / n;
    // Centring on the node mean keeps the running sums small.
    let (total, total_sq) = rows.iter().fold((0.0, 0.0), |(s, q), &r| {
        let v = y[r] - mean;
        (s + v, q + v * v)
    });
    let node_sse = total_sq - total * total / n;
    let tol = 1e-12 * node_sse.abs().max(f64::MIN_POSITIVE);

    let mut best = None;
    let mut order = Vec::with_capacity(rows.len());
    for &f in allowed.indices() {
        let col = d.column(f);
        sorted_by_feature(rows, col, &mut order);
        let (mut sum_l, mut sq_l) = (0.0, 0.0);
        for i in 0..order.len() - 1 {
            let v = y[order[i]] - mean;
            sum_l += v;
            sq_l += v * v;
            let (a, b) = (col[order[i]], col[order[i + 1]]);
            if a >= b {
                continue;
            }
            let n_l = (i + 1) as f64;
            let n_r = n - n_l;
            let sum_r = total - sum_l;
            let sse_l = sq_l - sum_l * sum_l / n_l;
            let sse_r = (total_sq - sq_l) - sum_r * sum_r / n_r;
            let gain = node_sse - sse_l - sse_r;
            Best::offer(
                &mut best,
                gain,
                Split {
                    feature: f,
                    threshold: midpoint(a, b),
                },
                tol,
            );
        }
    }
    best.map(|b| b.split)
}

fn weighted_gini(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let sq: f64 = counts.iter().map(|&c| (c * c) as f64).sum();
    n as f64 - sq / n as f64
}

fn best_gini_split(rows: &[usize], d: &Dataset, allowed: &FeatureSubset) -> Option<Split> {
    let codes = d.class_codes();
    let k = d.classes().len();
    let mut total = vec![0usize; k];
    for &r in rows {
        total[codes[r]] += 1;
    }
    let n = rows.len();
    let node_w = weighted_gini(&total, n);
    let tol = 1e-12 * node_w.abs().max(f64::MIN_POSITIVE);

    let mut best = None;
    let mut order = Vec::with_capacity(n);
    let mut left = vec![0usize; k];
    let mut right = vec![0usize; k];
    for &f in allowed.indices() {
        let col = d.column(f);
        sorted_by_feature(rows, col, &mut order);
        left.iter_mut().for_each(|c| *c = 0);
        right.copy_from_slice(&total);
        for i in 0..n - 1 {
            let c = codes[order[i]];
            left[c] += 1;
            right[c] -= 1;
            let (a, b) = (col[order[i]], col[order[i + 1]]);
            if a >= b {
                continue;
            }
            let gain = node_w - weighted_gini(&left, i + 1) - weighted_gini(&right, n - i - 1);
            Best::offer(
                &mut best,
                gain,
                Split {
                    feature: f,
                    threshold: midpoint(a, b),
                },
                tol,
            );
        }
    }
    best.map(|b| b.split)
}

fn leaf(d: &Dataset, rows: &[usize]) -> Node {
    let value = match d.task() {
        Task::Regression => {
            let y = d.target();
            rows.iter().map(|&r| y[r]).sum::<f64>() / rows.len() as f64
        }
        Task::Classification => {
            let mut counts = vec![0usize; d.classes().len()];
            for &r in rows {
                counts[d.class_codes()[r]] += 1;
            }
            // First maximum wins, i.e. the smallest label on a tie.
            let (code, _) =
                counts
                    .iter()
                    .enumerate()
                    .fold((0, 0), |acc, (i, &c)| if c > acc.1 { (i, c) } else { acc });
            d.classes()[code]
        }
    };
    Node::Leaf {
        value,
        n_samples: rows.len(),
    }
}

fn partition(d: &Dataset, rows: &[usize], split: Split) -> (Vec<usize>, Vec<usize>) {
    let col = d.column(split.feature);
    rows.iter().partition(|&&r| split.goes_left(col[r]))
}

fn grow(d: &Dataset, rows: &[usize], subset: &FeatureSubset, depth_left: usize) -> Node {
    if depth_left == 0 {
        return leaf(d, rows);
    }
    match best_split(rows, d, subset) {
        None => leaf(d, rows),
        Some(split) => {
            let (l, r) = partition(d, rows, split);
            Node::Internal {
                split,
                left: Box::new(grow(d, &l, subset, depth_left - 1)),
                right: Box::new(grow(d, &r, subset, depth_left - 1)),
            }
        }
    }
}

/// Fits a greedy depth-2 tree on the `train` rows using only `subset`.
///
/// The row order of `train` does not matter.
pub fn fit_two_tier(d: &Dataset, train: &[usize], subset: &FeatureSubset) -> Result<TwoTierTree> {
    if train.is_empty() {
        return Err(Error::EmptyTraining);
    }
    subset.check(d)?;
    let mut rows = train.to_vec();
    rows.sort_unstable();
    Ok(TwoTierTree {
        root: grow(d, &rows, subset, 2),
        subset: subset.clone(),
    })
}
