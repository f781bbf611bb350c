//! Brute-force split enumeration used as an independent check on the
//! greedy tree. Impurities are recomputed from scratch for every candidate.

use std::collections::BTreeMap;

use rand::Rng;
use twotier_core::data::{Dataset, Task};
use twotier_core::tree::{Node, TwoTierTree};

fn sse(y: &[f64]) -> f64 {
    let m = y.iter().sum::<f64>() / y.len() as f64;
    y.iter().map(|v| (v - m).powi(2)).sum()
}

fn weighted_gini(y: &[f64]) -> f64 {
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for v in y {
        *counts.entry(*v as i64).or_default() += 1;
    }
    let n = y.len() as f64;
    n * (1.0
        - counts
            .values()
            .map(|&c| (c as f64 / n).powi(2))
            .sum::<f64>())
}

pub fn impurity(d: &Dataset, rows: &[usize]) -> f64 {
    let y: Vec<f64> = rows.iter().map(|&r| d.target()[r]).collect();
    match d.task() {
        Task::Regression => sse(&y),
        Task::Classification => weighted_gini(&y),
    }
}

pub fn gain(d: &Dataset, rows: &[usize], feature: usize, threshold: f64) -> f64 {
    let col = d.column(feature);
    let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| col[i] <= threshold);
    impurity(d, rows) - impurity(d, &l) - impurity(d, &r)
}

/// Largest gain over every (feature, midpoint) candidate, or `None` when no
/// allowed feature varies on `rows`.
pub fn max_gain(d: &Dataset, rows: &[usize], allowed: &[usize]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for &f in allowed {
        let mut vals: Vec<f64> = rows.iter().map(|&r| d.column(f)[r]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        for w in vals.windows(2) {
            let g = gain(d, rows, f, (w[0] + w[1]) / 2.0);
            best = Some(best.map_or(g, |b: f64| b.max(g)));
        }
    }
    best
}

/// Walks the fitted tree and compares every node against the oracle.
/// Returns a description of the first mismatch.
pub fn check_tree(d: &Dataset, rows: &[usize], tree: &TwoTierTree) -> Result<(), String> {
    check_node(d, rows, &tree.root, tree.subset.indices(), 0)
}

fn check_node(
    d: &Dataset,
    rows: &[usize],
    node: &Node,
    allowed: &[usize],
    depth: usize,
) -> Result<(), String> {
    let pure = impurity(d, rows) <= 1e-12 * (1.0 + rows.len() as f64);
    let best = max_gain(d, rows, allowed);
    match node {
        Node::Leaf { n_samples, .. } => {
            if *n_samples != rows.len() {
                return Err(format!(
                    "leaf holds {n_samples} rows, expected {}",
                    rows.len()
                ));
            }
            if depth < 2 && !pure && rows.len() >= 2 && best.is_some() {
                return Err(format!("leaf at depth {depth} but a split exists"));
            }
            Ok(())
        }
        Node::Internal { split, left, right } => {
            if depth >= 2 {
                return Err("tree deeper than two tiers".into());
            }
            if !allowed.contains(&split.feature) {
                return Err(format!("feature {} outside subset", split.feature));
            }
            let best = best.ok_or("split chosen where no candidate exists")?;
            let got = gain(d, rows, split.feature, split.threshold);
            let tol = 1e-9 * (1.0 + best.abs());
            if got < best - tol {
                return Err(format!("gain {got} below brute-force maximum {best}"));
            }
            let col = d.column(split.feature);
            let (l, r): (Vec<usize>, Vec<usize>) =
                rows.iter().partition(|&&i| col[i] <= split.threshold);
            if l.is_empty() || r.is_empty() {
                return Err("split leaves an empty child".into());
            }
            check_node(d, &l, left, allowed, depth + 1)?;
            check_node(d, &r, right, allowed, depth + 1)
        }
    }
}

/// Small random dataset with many tied feature values.
pub fn random_dataset(rng: &mut impl Rng, task: Task) -> Dataset {
    loop {
        let n = rng.random_range(2..=30);
        let k = rng.random_range(1..=5);
        let levels = rng.random_range(2..=8);
        let columns: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        if rng.random_bool(0.8) {
                            rng.random_range(0..levels) as f64
                        } else {
                            rng.random_range(-3.0..3.0)
                        }
                    })
                    .collect()
            })
            .collect();
        let target: Vec<f64> = match task {
            Task::Regression => (0..n)
                .map(|_| rng.random_range(-50.0..50.0f64).round())
                .collect(),
            Task::Classification => (0..n).map(|_| rng.random_range(0..3) as f64).collect(),
        };
        let names = (0..k).map(|i| format!("x{i}")).collect();
        if let Ok(d) = Dataset::new(names, columns, target, task) {
            return d;
        }
    }
}
