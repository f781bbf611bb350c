//! Repeated seeded train/test evaluation and the triple scan.
//!
//! Every subset is scored on the same list of partitions: partition `j`
//! depends only on seed `j`, the row count and the train fraction. Scores
//! are stored per seed and aggregated in seed order afterwards, so results
//! do not depend on how the tasks were scheduled.

use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::data::{make_split, Dataset, SplitPlan};
use crate::error::{Error, Result};
use crate::exec::{map_ordered, Workers};
use crate::scoring::{score_full_data, score_subset, FloorScope};
use crate::tree::FeatureSubset;

/// Seeds `base + 1 ..= base + count`.
pub fn seed_list(base: u64, count: usize) -> Vec<u64> {
    (1..=count as u64).map(|j| base.wrapping_add(j)).collect()
}

/// The partitions shared by every subset of one evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitBank {
    plans: Vec<SplitPlan>,
}

impl SplitBank {
    pub fn new(n_rows: usize, train_fraction: f64, seeds: &[u64]) -> Result<Self> {
        let plans = seeds
            .iter()
            .map(|&s| make_split(n_rows, train_fraction, s))
            .collect::<Result<_>>()?;
        Ok(SplitBank { plans })
    }

    pub fn plans(&self) -> &[SplitPlan] {
        &self.plans
    }

    pub fn len(&self) -> usize {
        self.plans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plans.is_empty()
    }
}

/// Stable 64-bit digest of a partition, used to check pairing.
pub fn plan_fingerprint(plan: &SplitPlan) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    plan.train.hash(&mut h);
    plan.test.hash(&mut h);
    h.finish()
}

/// Per-seed test scores of one subset, in seed order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSample {
    pub subset: FeatureSubset,
    pub seeds: Vec<u64>,
    pub scores: Vec<f64>,
    /// [`plan_fingerprint`] of the partition behind each score.
    pub plans: Vec<u64>,
}

impl ScoreSample {
    pub fn mean(&self) -> f64 {
        mean(&self.scores)
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Scores `subsets` on every partition of `bank`, one task per
/// (subset, seed).
pub fn cv_scores_many(
    d: &Dataset,
    subsets: &[FeatureSubset],
    bank: &SplitBank,
    floor_scope: FloorScope,
    workers: Workers,
) -> Result<Vec<ScoreSample>> {
    if bank.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 seeds, got {}",
            bank.len()
        )));
    }
    let tasks: Vec<(usize, usize)> = (0..subsets.len())
        .flat_map(|s| (0..bank.len()).map(move |j| (s, j)))
        .collect();
    let results = map_ordered(&tasks, workers, |&(s, j)| {
        score_subset(d, &bank.plans[j], &subsets[s], floor_scope).map(|sc| sc.0)
    });

    let fingerprints: Vec<u64> = bank.plans.iter().map(plan_fingerprint).collect();
    let seeds: Vec<u64> = bank.plans.iter().map(|p| p.seed).collect();
    let mut out = Vec::with_capacity(subsets.len());
    let mut it = results.into_iter();
    for subset in subsets {
        let mut scores = Vec::with_capacity(bank.len());
        for (j, r) in it.by_ref().take(bank.len()).enumerate() {
            let score = r.map_err(|e| Error::Subset {
                subset: subset.label(d),
                source: Box::new(Error::Seed {
                    seed: seeds[j],
                    source: Box::new(e),
                }),
            })?;
            scores.push(score);
        }
        out.push(ScoreSample {
            subset: subset.clone(),
            seeds: seeds.clone(),
            scores,
            plans: fingerprints.clone(),
        });
    }
    Ok(out)
}

/// Scores one subset over the partitions generated from `seeds`.
pub fn cv_scores(
    d: &Dataset,
    subset: &FeatureSubset,
    seeds: &[u64],
    train_fraction: f64,
    floor_scope: FloorScope,
) -> Result<ScoreSample> {
    let bank = SplitBank::new(d.n_rows(), train_fraction, seeds)?;
    let mut v = cv_scores_many(
        d,
        std::slice::from_ref(subset),
        &bank,
        floor_scope,
        Workers::sequential(),
    )?;
    Ok(v.remove(0))
}

/// Confidence interval for a mean score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanCI {
    pub lo: f64,
    pub hi: f64,
    pub mean: f64,
}

impl MeanCI {
    pub fn from_bounds(lo: f64, hi: f64) -> Self {
        MeanCI {
            lo,
            hi,
            mean: (lo + hi) / 2.0,
        }
    }
}

/// Two-sided Student-t interval `mean ± t(1 - alpha/2, n - 1) · sd / √n`
/// with the sample standard deviation.
pub fn mean_ci(scores: &[f64], alpha: f64) -> Result<MeanCI> {
    let n = scores.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "confidence interval needs at least 2 scores, got {n}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha {alpha} outside (0, 1)"
        )));
    }
    let m = mean(scores);
    let var = scores.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(1.0 - alpha / 2.0);
    let half = t * var.sqrt() / (n as f64).sqrt();
    Ok(MeanCI {
        lo: m - half,
        hi: m + half,
        mean: m,
    })
}

/// Cross-validated interfering coefficient with its bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvCoefficient {
    pub min: f64,
    pub max: f64,
    pub mid: f64,
}

/// Ratio bounds of the pair interval over the triple interval:
/// `elim.lo / inter.hi` and `elim.hi / inter.lo`, plus their midpoint.
pub fn s_cv_bounds(ci_elim: &MeanCI, ci_inter: &MeanCI) -> Result<CvCoefficient> {
    if ci_inter.lo.is_nan() || ci_inter.lo <= 0.0 {
        return Err(Error::NonPositiveDenominator(ci_inter.lo));
    }
    let min = ci_elim.lo / ci_inter.hi;
    let max = ci_elim.hi / ci_inter.lo;
    Ok(CvCoefficient {
        min,
        max,
        mid: (min + max) / 2.0,
    })
}

/// One significant triple `(f1, f2, s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleRecord {
    pub f1: usize,
    pub f2: usize,
    pub s: usize,
    /// Interval for the tree on `{f1, f2, s}`.
    pub ci_inter: MeanCI,
    /// Interval for the tree on `{f1, f2}`.
    pub ci_elim: MeanCI,
    /// `None` (flagged) when `ci_inter.lo` is not positive.
    pub coefficient: Option<CvCoefficient>,
}

impl TripleRecord {
    pub fn flagged(&self) -> bool {
        self.coefficient.is_none()
    }
}

/// How pair complementarity is judged during a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComplementPolicy {
    /// Mean cross-validated test scores.
    #[default]
    CvMean,
    /// In-sample scores of trees fitted on every row.
    FullData,
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub seeds: Vec<u64>,
    pub train_fraction: f64,
    pub alpha: f64,
    pub floor_scope: FloorScope,
    pub policy: ComplementPolicy,
    pub workers: Workers,
}

impl ScanConfig {
    pub fn new(repetitions: usize, seed_base: u64) -> Self {
        ScanConfig {
            seeds: seed_list(seed_base, repetitions),
            train_fraction: 0.7,
            alpha: 0.05,
            floor_scope: FloorScope::Train,
            policy: ComplementPolicy::CvMean,
            workers: Workers::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutput {
    pub records: Vec<TripleRecord>,
    pub complementary_pairs: Vec<(usize, usize)>,
    /// Every score sample computed, keyed by subset.
    pub samples: BTreeMap<FeatureSubset, ScoreSample>,
}

fn evaluate_into(
    d: &Dataset,
    subsets: Vec<FeatureSubset>,
    bank: &SplitBank,
    cfg: &ScanConfig,
    cache: &mut BTreeMap<FeatureSubset, ScoreSample>,
) -> Result<()> {
    let todo: Vec<FeatureSubset> = subsets
        .into_iter()
        .filter(|s| !cache.contains_key(s))
        .collect();
    for sample in cv_scores_many(d, &todo, bank, cfg.floor_scope, cfg.workers)? {
        cache.insert(sample.subset.clone(), sample);
    }
    Ok(())
}

fn subset_of(ix: &[usize]) -> FeatureSubset {
    FeatureSubset::new(ix.iter().copied()).expect("non-empty literal subset")
}

/// Finds the triples whose pair interval lies strictly above the triple
/// interval.
///
/// Singletons and pairs are scored once and reused. Complementary pairs are
/// chosen by `cfg.policy`; each is then tested against every third feature.
/// Records come out sorted by `(f1, f2, s)`.
pub fn scan_triples(d: &Dataset, cfg: &ScanConfig) -> Result<ScanOutput> {
    let k = d.n_features();
    if k < 3 {
        return Err(Error::TooFewFeatures {
            needed: 3,
            found: k,
        });
    }
    if cfg.seeds.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 seeds, got {}",
            cfg.seeds.len()
        )));
    }
    mean_ci(&[0.0, 0.0], cfg.alpha)?;
    let bank = SplitBank::new(d.n_rows(), cfg.train_fraction, &cfg.seeds)?;
    let mut cache = BTreeMap::new();

    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|a| (a + 1..k).map(move |b| (a, b)))
        .collect();

    let complementary: Vec<(usize, usize)> = match cfg.policy {
        ComplementPolicy::CvMean => {
            let mut first: Vec<FeatureSubset> = (0..k).map(|f| subset_of(&[f])).collect();
            first.extend(pairs.iter().map(|&(a, b)| subset_of(&[a, b])));
            evaluate_into(d, first, &bank, cfg, &mut cache)?;
            let m = |ix: &[usize]| cache[&subset_of(ix)].mean();
            pairs
                .iter()
                .copied()
                .filter(|&(a, b)| m(&[a, b]) > m(&[a]).max(m(&[b])))
                .collect()
        }
        ComplementPolicy::FullData => {
            let single: Vec<f64> = (0..k)
                .map(|f| score_full_data(d, &subset_of(&[f])).map(|s| s.0))
                .collect::<Result<_>>()?;
            let mut out = Vec::new();
            for &(a, b) in &pairs {
                let t12 = score_full_data(d, &subset_of(&[a, b]))?.0;
                if t12 > single[a].max(single[b]) {
                    out.push((a, b));
                }
            }
            out
        }
    };

    let mut needed = BTreeSet::new();
    for &(a, b) in &complementary {
        needed.insert(subset_of(&[a, b]));
        for s in (0..k).filter(|&s| s != a && s != b) {
            needed.insert(subset_of(&[a, b, s]));
        }
    }
    evaluate_into(d, needed.into_iter().collect(), &bank, cfg, &mut cache)?;

    let mut records = Vec::new();
    for &(a, b) in &complementary {
        let ci_elim = mean_ci(&cache[&subset_of(&[a, b])].scores, cfg.alpha)?;
        for s in (0..k).filter(|&s| s != a && s != b) {
            let ci_inter = mean_ci(&cache[&subset_of(&[a, b, s])].scores, cfg.alpha)?;
            if ci_elim.lo > ci_inter.hi {
                records.push(TripleRecord {
                    f1: a,
                    f2: b,
                    s,
                    ci_inter,
                    ci_elim,
                    coefficient: s_cv_bounds(&ci_elim, &ci_inter).ok(),
                });
            }
        }
    }

    Ok(ScanOutput {
        records,
        complementary_pairs: complementary,
        samples: cache,
    })
}
