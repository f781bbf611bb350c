mod support;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twotier_core::data::Task;
use twotier_core::tree::{best_split, fit_two_tier, FeatureSubset};

use support::oracle;

fn run(task: Task, cases: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let d = oracle::random_dataset(&mut rng, task);
        let rows: Vec<usize> = (0..d.n_rows()).collect();
        let subset = FeatureSubset::new(0..d.n_features()).unwrap();
        let tree = fit_two_tier(&d, &rows, &subset).unwrap();
        if let Err(msg) = oracle::check_tree(&d, &rows, &tree) {
            panic!(
                "{task} case {case}: {msg}\n{}",
                tree.render(d.feature_names())
            );
        }
    }
}

#[test]
fn regression_splits_match_brute_force() {
    run(Task::Regression, 300, 11);
}

#[test]
fn classification_splits_match_brute_force() {
    run(Task::Classification, 300, 12);
}

#[test]
fn restricted_subsets_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let d = oracle::random_dataset(&mut rng, Task::Regression);
        let k = d.n_features();
        let subset = FeatureSubset::new((0..k).filter(|f| f % 2 == 0)).unwrap();
        let rows: Vec<usize> = (0..d.n_rows()).filter(|r| r % 3 != 1).collect();
        if rows.len() < 2 {
            continue;
        }
        let tree = fit_two_tier(&d, &rows, &subset).unwrap();
        oracle::check_tree(&d, &rows, &tree).unwrap();
    }
}

#[test]
fn step_example_matches_brute_force_enumeration() {
    let d = twotier_core::data::Dataset::new(
        vec!["x".into()],
        vec![vec![0.0, 1.0, 2.0, 3.0]],
        vec![0.0, 0.0, 10.0, 10.0],
        Task::Regression,
    )
    .unwrap();
    let rows = [0, 1, 2, 3];
    // Candidates 0.5, 1.5, 2.5 give gains 33.33, 100, 33.33.
    let gains: Vec<f64> = [0.5, 1.5, 2.5]
        .iter()
        .map(|&t| oracle::gain(&d, &rows, 0, t))
        .collect();
    assert!((gains[1] - 100.0).abs() < 1e-12 && gains[0] < gains[1] && gains[2] < gains[1]);
    let s = best_split(&rows, &d, &FeatureSubset::new([0]).unwrap()).unwrap();
    assert_eq!(s.threshold, 1.5);
}
