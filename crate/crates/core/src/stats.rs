//! Rank correlation and per-dataset summaries of scan results.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::crossval::TripleRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub rho: f64,
    pub p_value: f64,
}

/// 1-based ranks; tied values share the average of their positions.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && xs[order[j]] == xs[order[i]] {
            j += 1;
        }
        // Positions i..j (0-based) hold rank (i + 1 + j) / 2.
        let rank = (i + 1 + j) as f64 / 2.0;
        for &o in &order[i..j] {
            ranks[o] = rank;
        }
        i = j;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

/// Spearman's rho as the Pearson correlation of average ranks, with a
/// two-sided p-value from `t = rho · √((n - 2) / (1 - rho²))` on `n - 2`
/// degrees of freedom.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<Correlation> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument(format!(
            "spearman inputs differ in length: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "spearman needs at least 3 pairs, got {n}"
        )));
    }
    for v in [xs, ys] {
        if v.iter().all(|&x| x == v[0]) {
            return Err(Error::InvalidArgument("spearman input is constant".into()));
        }
    }
    let rho = pearson(&average_ranks(xs), &average_ranks(ys));
    let df = (n - 2) as f64;
    let p_value = if rho.abs() >= 1.0 {
        0.0
    } else {
        let t = rho * (df / (1.0 - rho * rho)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
        (2.0 * dist.sf(t.abs())).min(1.0)
    };
    Ok(Correlation { rho, p_value })
}

pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("median of an empty list".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Ok(if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    })
}

/// The two numbers a summary needs from a triple.
pub trait TripleStats {
    /// Midpoint of the interval for the tree with the interfering feature.
    fn t_inter_mean(&self) -> f64;
    /// Cross-validated coefficient, `None` for flagged triples.
    fn s_cv(&self) -> Option<f64>;
}

impl TripleStats for TripleRecord {
    fn t_inter_mean(&self) -> f64 {
        self.ci_inter.mean
    }

    fn s_cv(&self) -> Option<f64> {
        self.coefficient.map(|c| c.mid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    /// Number of triples, flagged ones included.
    pub triple_count: usize,
    pub s_min: f64,
    pub s_median: f64,
    pub s_max: f64,
    pub t_median: f64,
    /// Absent below three unflagged triples or for constant inputs.
    pub correlation: Option<Correlation>,
}

/// Aggregates a dataset's triples. Flagged triples count towards the total
/// and the median score but not towards the coefficient statistics.
pub fn summarize<R: TripleStats>(records: &[R]) -> Result<DatasetSummary> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no triples to summarize".into()));
    }
    let (t_scored, s_cv): (Vec<f64>, Vec<f64>) = records
        .iter()
        .filter_map(|r| r.s_cv().map(|s| (r.t_inter_mean(), s)))
        .unzip();
    if s_cv.is_empty() {
        return Err(Error::InvalidArgument(
            "every triple is flagged; no coefficients to summarize".into(),
        ));
    }
    let t_all: Vec<f64> = records.iter().map(TripleStats::t_inter_mean).collect();
    let correlation = if s_cv.len() >= 3 {
        spearman(&t_scored, &s_cv).ok()
    } else {
        None
    };
    Ok(DatasetSummary {
        triple_count: records.len(),
        s_min: s_cv.iter().copied().fold(f64::INFINITY, f64::min),
        s_median: median(&s_cv)?,
        s_max: s_cv.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        t_median: median(&t_all)?,
        correlation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossval::{CvCoefficient, MeanCI};
    use proptest::prelude::*;

    fn record(t: f64, s: Option<f64>) -> TripleRecord {
        TripleRecord {
            f1: 0,
            f2: 1,
            s: 2,
            ci_inter: MeanCI::from_bounds(t, t),
            ci_elim: MeanCI::from_bounds(1.0, 1.0),
            coefficient: s.map(|mid| CvCoefficient {
                min: mid,
                max: mid,
                mid,
            }),
        }
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(
            average_ranks(&[10.0, 20.0, 20.0, 5.0]),
            [2.0, 3.5, 3.5, 1.0]
        );
    }

    #[test]
    fn perfect_concordance_and_discordance() {
        let x = [1.0, 2.0, 5.0, 9.0, 11.0];
        let up = spearman(&x, &x).unwrap();
        assert_eq!(up.rho, 1.0);
        assert_eq!(up.p_value, 0.0);
        let rev: Vec<f64> = x.iter().rev().copied().collect();
        assert_eq!(spearman(&x, &rev).unwrap().rho, -1.0);
    }

    #[test]
    fn spearman_errors() {
        assert!(spearman(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(spearman(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn spearman_matches_reference_with_ties() {
        // Reference: scipy.stats.spearmanr on the same vectors.
        let x = [1.0, 2.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let y = [2.0, 1.0, 4.0, 3.0, 3.0, 7.0, 6.0];
        let c = spearman(&x, &y).unwrap();
        assert!((c.rho - 0.7454545454545455).abs() < 1e-9, "{c:?}");
        assert!((c.p_value - 0.05444053868643692).abs() < 1e-6, "{c:?}");
    }

    #[test]
    fn median_examples() {
        assert_eq!(median(&[5.0]).unwrap(), 5.0);
        assert_eq!(median(&[3.0, 1.0, 2.0]).unwrap(), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]).unwrap(), 2.5);
        assert!(median(&[]).is_err());
    }

    #[test]
    fn summarize_single_and_pair() {
        let one = summarize(&[record(0.0034, Some(24.77))]).unwrap();
        assert_eq!(one.triple_count, 1);
        assert_eq!((one.s_min, one.s_median, one.s_max), (24.77, 24.77, 24.77));
        assert_eq!(one.t_median, 0.0034);
        assert!(one.correlation.is_none());

        let two = summarize(&[record(0.2, Some(1.5)), record(0.2, Some(1.5))]).unwrap();
        assert_eq!((two.s_min, two.s_median, two.s_max), (1.5, 1.5, 1.5));
        assert!(two.correlation.is_none());
    }

    #[test]
    fn summarize_skips_flagged_coefficients() {
        let recs = [
            record(0.1, Some(2.0)),
            record(0.3, None),
            record(0.2, Some(1.2)),
        ];
        let s = summarize(&recs).unwrap();
        assert_eq!(s.triple_count, 3);
        assert_eq!((s.s_min, s.s_max), (1.2, 2.0));
        assert_eq!(s.t_median, 0.2);
        assert!(s.correlation.is_none());
        assert!(summarize(&[record(0.1, None)]).is_err());
        assert!(summarize::<TripleRecord>(&[]).is_err());
    }

    #[test]
    fn constant_coefficients_give_no_correlation() {
        let recs: Vec<_> = (0..4).map(|i| record(i as f64, Some(1.3))).collect();
        assert!(summarize(&recs).unwrap().correlation.is_none());
    }

    proptest! {
        #[test]
        fn spearman_symmetric_and_monotone_invariant(
            pairs in prop::collection::vec((0u8..20, 0u8..20), 3..30),
        ) {
            let x: Vec<f64> = pairs.iter().map(|p| f64::from(p.0)).collect();
            let y: Vec<f64> = pairs.iter().map(|p| f64::from(p.1)).collect();
            prop_assume!(x.iter().any(|&v| v != x[0]) && y.iter().any(|&v| v != y[0]));
            let a = spearman(&x, &y).unwrap();
            let b = spearman(&y, &x).unwrap();
            prop_assert!((a.rho - b.rho).abs() < 1e-12);
            let xt: Vec<f64> = x.iter().map(|v| (v * 0.3).exp() + 7.0).collect();
            let c = spearman(&xt, &y).unwrap();
            prop_assert!((a.rho - c.rho).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&a.rho));
        }

        #[test]
        fn median_permutation_invariant(mut v in prop::collection::vec(-50.0f64..50.0, 1..30), seed: u64) {
            let m = median(&v).unwrap();
            crate::data::SplitMix64::new(seed).shuffle(&mut v);
            prop_assert_eq!(median(&v).unwrap(), m);
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(lo <= m && m <= hi);
        }
    }
}
