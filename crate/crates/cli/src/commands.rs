use std::fmt;
use std::path::Path;

use twotier_core::crossval::{scan_triples, seed_list, ScanConfig};
use twotier_core::data::{
    emit_synthetic, filter_rows, load_csv, write_csv_file, Dataset, SYNTHETIC_TARGET,
};
use twotier_core::exec::Workers;
use twotier_core::report::{
    format_summary_table, read_report, report_rows, write_report_file, ReportRow,
};
use twotier_core::scoring::score_full_data;
use twotier_core::stats::summarize as summarize_rows;
use twotier_core::tree::{fit_two_tier, FeatureSubset};
use twotier_core::Error;

use crate::{DatasetArgs, FitArgs, ScanArgs, SummarizeArgs, EXIT_DATA, EXIT_IO, EXIT_USAGE};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Core(e) if e.is_io() => EXIT_IO,
            CliError::Core(_) => EXIT_DATA,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage: {msg}"),
            CliError::Data(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn load(args: &DatasetArgs) -> Result<Dataset> {
    let d = load_csv(&args.input, &args.target, args.task.into())?;
    match &args.filter {
        None => Ok(d),
        Some(spec) => {
            let parts: Vec<&str> = spec.split(':').collect();
            let [feature, lo, hi] = parts[..] else {
                return Err(CliError::Usage(format!(
                    "--filter `{spec}` is not FEATURE:LO:HI"
                )));
            };
            let bound = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("--filter bound `{s}` is not a number")))
            };
            Ok(filter_rows(&d, feature, bound(lo)?, bound(hi)?)?)
        }
    }
}

pub fn synth(out: &Path) -> Result<()> {
    write_csv_file(&emit_synthetic(), SYNTHETIC_TARGET, out)?;
    println!("wrote 20 rows to {}", out.display());
    Ok(())
}

pub fn fit(args: FitArgs) -> Result<()> {
    if args.features.is_empty() || args.features.iter().any(|f| f.trim().is_empty()) {
        return Err(CliError::Usage(
            "--features needs at least one feature name".into(),
        ));
    }
    let d = load(&args.data)?;
    let indices = args
        .features
        .iter()
        .map(|name| d.feature_index(name.trim()))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let subset = FeatureSubset::new(indices)?;
    let rows: Vec<usize> = (0..d.n_rows()).collect();
    let tree = fit_two_tier(&d, &rows, &subset)?;
    let score = score_full_data(&d, &subset)?;

    println!("features: {}", subset.label(&d));
    print!("{}", tree.render(d.feature_names()));
    println!("training score: {:.6}", score.0);
    Ok(())
}

fn scan_config(args: &ScanArgs) -> Result<ScanConfig> {
    if args.splits < 2 {
        return Err(CliError::Usage(format!(
            "--splits must be at least 2, got {}",
            args.splits
        )));
    }
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(CliError::Usage(format!(
            "--alpha must lie in (0, 1), got {}",
            args.alpha
        )));
    }
    if !(args.train_fraction > 0.0 && args.train_fraction < 1.0) {
        return Err(CliError::Usage(format!(
            "--train-fraction must lie in (0, 1), got {}",
            args.train_fraction
        )));
    }
    Ok(ScanConfig {
        seeds: seed_list(args.seed_base, args.splits),
        train_fraction: args.train_fraction,
        alpha: args.alpha,
        floor_scope: args.data.floor_scope.into(),
        policy: args.complement.into(),
        workers: Workers(args.workers),
    })
}

pub fn scan(args: ScanArgs) -> Result<()> {
    let cfg = scan_config(&args)?;
    let d = load(&args.data)?;
    let out = scan_triples(&d, &cfg)?;
    let rows = report_rows(&out.records, &d);
    write_report_file(&rows, args.format.into(), &args.out)?;

    println!(
        "{} complementary pairs, {} triples with interference; report written to {}",
        out.complementary_pairs.len(),
        rows.len(),
        args.out.display()
    );
    if rows.is_empty() {
        println!("0 triples: no pair interval lies above a triple interval");
    }
    let flagged = rows.iter().filter(|r| r.flagged).count();
    if flagged > 0 {
        println!("{flagged} triples flagged: non-positive lower bound on the triple score, no coefficient");
    }
    Ok(())
}

fn dataset_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn summarize(args: SummarizeArgs) -> Result<()> {
    let mut table = Vec::new();
    let mut pooled: Vec<ReportRow> = Vec::new();
    for path in &args.reports {
        let rows = read_report(path)?;
        let summary = summarize_rows(&rows)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        table.push((dataset_label(path), summary));
        pooled.extend(rows);
    }
    table.push(("ALL".to_string(), summarize_rows(&pooled)?));

    let text = format_summary_table(&table);
    print!("{text}");
    if let Some(out) = &args.out {
        std::fs::write(out, &text).map_err(|source| Error::Io {
            path: out.clone(),
            source,
        })?;
    }
    Ok(())
}
