//! Complementary pairs and interfering features.
//!
//! A pair is complementary when the tree on both features scores strictly
//! higher than either single-feature tree. A third feature interferes with
//! such a pair when adding it makes the greedy tree score lower than the
//! pair alone; the interfering coefficient is the ratio of the two scores.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::scoring::{score_full_data, Score};
use crate::tree::FeatureSubset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFinding {
    pub f1: usize,
    pub f2: usize,
    pub t1: Score,
    pub t2: Score,
    pub t12: Score,
}

impl PairFinding {
    pub fn is_complementary(&self) -> bool {
        is_complementary(self.t1, self.t2, self.t12)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleFinding {
    pub f1: usize,
    pub f2: usize,
    pub s: usize,
    pub t12: Score,
    pub t12s: Score,
    /// `None` when `t12s` is not positive.
    pub coefficient: Option<f64>,
}

impl TripleFinding {
    pub fn is_interfering(&self) -> bool {
        self.t12 > self.t12s
    }
}

pub fn is_complementary(t1: Score, t2: Score, t12: Score) -> bool {
    t12.0 > t1.0.max(t2.0)
}

/// `t12 / t12s`, defined only for a positive denominator.
pub fn interference_coefficient(t12: Score, t12s: Score) -> Result<f64> {
    if t12s.0.is_nan() || t12s.0 <= 0.0 {
        return Err(Error::NonPositiveDenominator(t12s.0));
    }
    Ok(t12.0 / t12s.0)
}

/// In-sample pair check with trees fitted and scored on every row.
pub fn pair_finding(d: &Dataset, f1: usize, f2: usize) -> Result<PairFinding> {
    let (f1, f2) = (f1.min(f2), f1.max(f2));
    if f1 == f2 {
        return Err(Error::InvalidArgument(
            "pair needs two distinct features".into(),
        ));
    }
    Ok(PairFinding {
        f1,
        f2,
        t1: score_full_data(d, &FeatureSubset::new([f1])?)?,
        t2: score_full_data(d, &FeatureSubset::new([f2])?)?,
        t12: score_full_data(d, &FeatureSubset::new([f1, f2])?)?,
    })
}

/// In-sample triple check for the pair `(f1, f2)` and candidate `s`.
pub fn triple_finding(d: &Dataset, f1: usize, f2: usize, s: usize) -> Result<TripleFinding> {
    let (f1, f2) = (f1.min(f2), f1.max(f2));
    if s == f1 || s == f2 || f1 == f2 {
        return Err(Error::InvalidArgument(
            "triple needs three distinct features".into(),
        ));
    }
    let t12 = score_full_data(d, &FeatureSubset::new([f1, f2])?)?;
    let t12s = score_full_data(d, &FeatureSubset::new([f1, f2, s])?)?;
    Ok(TripleFinding {
        f1,
        f2,
        s,
        t12,
        t12s,
        coefficient: interference_coefficient(t12, t12s).ok(),
    })
}
