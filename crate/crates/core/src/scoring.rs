//! Performance scores for subset evaluation.
//!
//! Regression uses the fraction of explained variance. Classification uses
//! accuracy rescaled so that always predicting the majority class scores 0
//! and a perfect model scores 1.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, SplitPlan, Task};
use crate::error::{Error, Result};
use crate::tree::{fit_two_tier, FeatureSubset};

/// Dimensionless performance score. Test-set scores may be negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Score(pub f64);

impl Score {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Which rows the majority-class floor of the normalised accuracy is
/// counted on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FloorScope {
    /// The training part of each split.
    #[default]
    Train,
    /// Every row of the dataset.
    Full,
}

impl std::str::FromStr for FloorScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(FloorScope::Train),
            "full" => Ok(FloorScope::Full),
            other => Err(Error::InvalidArgument(format!(
                "unknown floor scope `{other}`"
            ))),
        }
    }
}

/// `1 - SSE / SST`.
pub fn explained_variance_fraction(y_true: &[f64], y_pred: &[f64]) -> Result<Score> {
    if y_true.len() != y_pred.len() {
        return Err(Error::InvalidArgument(format!(
            "{} targets but {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.len() < 2 {
        return Err(Error::UndefinedScore("need at least two targets".into()));
    }
    if y_true.iter().all(|&v| v == y_true[0]) {
        return Err(Error::UndefinedScore("target is constant".into()));
    }
    let mean = y_true.iter().sum::<f64>() / y_true.len() as f64;
    let sst: f64 = y_true.iter().map(|v| (v - mean).powi(2)).sum();
    let sse: f64 = y_true
        .iter()
        .zip(y_pred)
        .map(|(t, p)| (t - p).powi(2))
        .sum();
    Ok(Score(1.0 - sse / sst))
}

/// Share of the most frequent label, `max(M, N - M) / N` in the binary case.
pub fn normalized_accuracy_floor(labels: &[f64]) -> Result<Score> {
    if labels.is_empty() {
        return Err(Error::DegenerateTarget("no labels".into()));
    }
    let mut sorted = labels.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best = 0;
    let mut run = 0;
    for i in 0..sorted.len() {
        run = if i > 0 && sorted[i] == sorted[i - 1] {
            run + 1
        } else {
            1
        };
        best = best.max(run);
    }
    if best == sorted.len() {
        return Err(Error::DegenerateTarget("only one class present".into()));
    }
    Ok(Score(best as f64 / labels.len() as f64))
}

/// `(accuracy - floor) / (1 - floor)`; negative below the floor.
pub fn normalized_accuracy(accuracy: f64, floor: Score) -> Result<Score> {
    let floor = floor.0;
    if !(floor > 0.0 && floor < 1.0) {
        return Err(Error::DegenerateTarget(format!(
            "accuracy floor {floor} outside (0, 1)"
        )));
    }
    Ok(Score((accuracy - floor) / (1.0 - floor)))
}

/// Fits on `plan.train` restricted to `subset` and scores on `plan.test`.
pub fn score_subset(
    d: &Dataset,
    plan: &SplitPlan,
    subset: &FeatureSubset,
    floor_scope: FloorScope,
) -> Result<Score> {
    let tree = fit_two_tier(d, &plan.train, subset)?;
    let y = d.target();
    let truth: Vec<f64> = plan.test.iter().map(|&r| y[r]).collect();
    let pred: Vec<f64> = plan.test.iter().map(|&r| tree.predict(d, r)).collect();
    match d.task() {
        Task::Regression => explained_variance_fraction(&truth, &pred),
        Task::Classification => {
            let floor = match floor_scope {
                FloorScope::Train => {
                    let labels: Vec<f64> = plan.train.iter().map(|&r| y[r]).collect();
                    normalized_accuracy_floor(&labels)?
                }
                FloorScope::Full => normalized_accuracy_floor(y)?,
            };
            let hits = truth.iter().zip(&pred).filter(|(t, p)| t == p).count();
            normalized_accuracy(hits as f64 / truth.len() as f64, floor)
        }
    }
}

/// In-sample score: train and test are every row.
pub fn score_full_data(d: &Dataset, subset: &FeatureSubset) -> Result<Score> {
    score_subset(
        d,
        &SplitPlan::resubstitution(d.n_rows()),
        subset,
        FloorScope::Full,
    )
}
