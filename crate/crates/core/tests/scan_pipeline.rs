use proptest::prelude::*;
use twotier_core::crossval::{scan_triples, ScanConfig};
use twotier_core::data::{emit_synthetic, load_csv, write_csv, Dataset, Task};
use twotier_core::exec::Workers;
use twotier_core::report::{report_rows, write_report, ReportFormat};

#[test]
fn synthetic_scan_reports_the_interfering_triple() {
    let d = emit_synthetic();
    let mut cfg = ScanConfig::new(300, 0);
    cfg.workers = Workers(4);
    let out = scan_triples(&d, &cfg).unwrap();
    assert!(out.complementary_pairs.contains(&(0, 1)));
    let rec = out
        .records
        .iter()
        .find(|r| (r.f1, r.f2, r.s) == (0, 1, 2))
        .expect("triple (f1, f2, s)");
    // Six-row test sets make the {f1, f2, s} score negative on average, so
    // the triple is significant but carries no ratio.
    assert!(rec.ci_elim.lo > 0.8);
    assert!(rec.ci_inter.hi < 0.0);
    assert!(rec.flagged());
    for r in &out.records {
        assert!(r.ci_elim.lo > r.ci_inter.hi);
        if let Some(c) = r.coefficient {
            assert!(c.min > 1.0);
        }
    }
    let mut sorted = out.records.clone();
    sorted.sort_by_key(|r| (r.f1, r.f2, r.s));
    assert_eq!(sorted, out.records);
}

#[test]
fn scan_report_is_schedule_independent() {
    let d = emit_synthetic();
    let render = |w: usize| {
        let mut cfg = ScanConfig::new(120, 7);
        cfg.workers = Workers(w);
        let out = scan_triples(&d, &cfg).unwrap();
        let mut buf = Vec::new();
        write_report(&report_rows(&out.records, &d), ReportFormat::Json, &mut buf).unwrap();
        (out, buf)
    };
    let (seq, seq_bytes) = render(1);
    for w in [0, 2, 5] {
        let (par, par_bytes) = render(w);
        assert_eq!(par, seq);
        assert_eq!(par_bytes, seq_bytes);
    }
}

#[test]
fn classification_scan_runs() {
    // XOR of a and b decides the label; c is a noisy copy of the label that
    // a greedy root prefers.
    let n = 200;
    let mut cols = vec![Vec::new(), Vec::new(), Vec::new()];
    let mut y = Vec::new();
    let mut rng = twotier_core::data::SplitMix64::new(5);
    for _ in 0..n {
        let a = rng.below(2) as f64;
        let b = rng.below(2) as f64;
        let label = if a != b { 1.0 } else { 0.0 };
        let c = if rng.below(10) < 7 {
            label
        } else {
            1.0 - label
        } + rng.below(3) as f64 * 10.0;
        cols[0].push(a);
        cols[1].push(b);
        cols[2].push(c);
        y.push(label);
    }
    let d = Dataset::new(
        vec!["a".into(), "b".into(), "c".into()],
        cols,
        y,
        Task::Classification,
    )
    .unwrap();
    let mut cfg = ScanConfig::new(50, 0);
    cfg.workers = Workers(2);
    let out = scan_triples(&d, &cfg).unwrap();
    assert!(out.complementary_pairs.contains(&(0, 1)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip_is_exact(
        rows in prop::collection::vec(prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 3), 2..12),
    ) {
        let cols: Vec<Vec<f64>> = (0..2).map(|c| rows.iter().map(|r| r[c]).collect()).collect();
        let y: Vec<f64> = rows.iter().map(|r| r[2]).collect();
        let d = Dataset::new(vec!["a".into(), "b".into()], cols, y, Task::Regression).unwrap();
        let mut buf = Vec::new();
        write_csv(&d, "y", &mut buf).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        std::fs::write(&path, &buf).unwrap();
        let back = load_csv(&path, "y", Task::Regression).unwrap();
        for c in 0..2 {
            let same = back.column(c).iter().zip(d.column(c)).all(|(a, b)| a.to_bits() == b.to_bits());
            prop_assert!(same);
        }
        let mut again = Vec::new();
        write_csv(&back, "y", &mut again).unwrap();
        prop_assert_eq!(again, buf);
    }
}
