//! Scan report files (CSV and JSON) and the summary table.
//!
//! Both report formats carry the same fields per triple, including the full
//! interval bounds, so summaries can be recomputed from a report alone. CSV
//! numbers are printed to 6 significant digits; JSON keeps full precision.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::crossval::{CvCoefficient, MeanCI, TripleRecord};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::stats::{DatasetSummary, TripleStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::InvalidArgument(format!("unknown format `{other}`"))),
        }
    }
}

pub const CSV_COLUMNS: [&str; 14] = [
    "index",
    "f1",
    "f2",
    "s",
    "S_cv",
    "S_cv_min",
    "S_cv_max",
    "t_inter_mean",
    "t_inter_lo",
    "t_inter_hi",
    "t_elim_mean",
    "t_elim_lo",
    "t_elim_hi",
    "flagged",
];

/// One report line: a triple with feature names instead of indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub index: usize,
    pub f1: String,
    pub f2: String,
    pub s: String,
    #[serde(rename = "S_cv")]
    pub s_cv: Option<f64>,
    #[serde(rename = "S_cv_min")]
    pub s_cv_min: Option<f64>,
    #[serde(rename = "S_cv_max")]
    pub s_cv_max: Option<f64>,
    pub t_inter_mean: f64,
    pub t_inter_lo: f64,
    pub t_inter_hi: f64,
    pub t_elim_mean: f64,
    pub t_elim_lo: f64,
    pub t_elim_hi: f64,
    pub flagged: bool,
}

impl ReportRow {
    pub fn from_record(index: usize, r: &TripleRecord, d: &Dataset) -> Self {
        ReportRow {
            index,
            f1: d.feature_name(r.f1).to_string(),
            f2: d.feature_name(r.f2).to_string(),
            s: d.feature_name(r.s).to_string(),
            s_cv: r.coefficient.map(|c| c.mid),
            s_cv_min: r.coefficient.map(|c| c.min),
            s_cv_max: r.coefficient.map(|c| c.max),
            t_inter_mean: r.ci_inter.mean,
            t_inter_lo: r.ci_inter.lo,
            t_inter_hi: r.ci_inter.hi,
            t_elim_mean: r.ci_elim.mean,
            t_elim_lo: r.ci_elim.lo,
            t_elim_hi: r.ci_elim.hi,
            flagged: r.flagged(),
        }
    }

    pub fn ci_inter(&self) -> MeanCI {
        MeanCI {
            lo: self.t_inter_lo,
            hi: self.t_inter_hi,
            mean: self.t_inter_mean,
        }
    }

    pub fn ci_elim(&self) -> MeanCI {
        MeanCI {
            lo: self.t_elim_lo,
            hi: self.t_elim_hi,
            mean: self.t_elim_mean,
        }
    }

    pub fn coefficient(&self) -> Option<CvCoefficient> {
        match (self.flagged, self.s_cv_min, self.s_cv_max, self.s_cv) {
            (false, Some(min), Some(max), Some(mid)) => Some(CvCoefficient { min, max, mid }),
            _ => None,
        }
    }

    fn csv_line(&self) -> String {
        let opt = |v: Option<f64>| v.map(format_sig6).unwrap_or_default();
        [
            self.index.to_string(),
            self.f1.clone(),
            self.f2.clone(),
            self.s.clone(),
            opt(self.s_cv),
            opt(self.s_cv_min),
            opt(self.s_cv_max),
            format_sig6(self.t_inter_mean),
            format_sig6(self.t_inter_lo),
            format_sig6(self.t_inter_hi),
            format_sig6(self.t_elim_mean),
            format_sig6(self.t_elim_lo),
            format_sig6(self.t_elim_hi),
            self.flagged.to_string(),
        ]
        .join(",")
    }
}

impl TripleStats for ReportRow {
    fn t_inter_mean(&self) -> f64 {
        self.t_inter_mean
    }

    fn s_cv(&self) -> Option<f64> {
        self.coefficient().map(|c| c.mid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub records: Vec<ReportRow>,
}

/// Rows numbered from 1 in record order.
pub fn report_rows(records: &[TripleRecord], d: &Dataset) -> Vec<ReportRow> {
    records
        .iter()
        .enumerate()
        .map(|(i, r)| ReportRow::from_record(i + 1, r, d))
        .collect()
}

/// `%g`-style formatting with `digits` significant digits and trailing
/// zeros removed.
pub fn format_sig(x: f64, digits: usize) -> String {
    assert!(digits > 0);
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

pub fn format_sig6(x: f64) -> String {
    format_sig(x, 6)
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_report(
    rows: &[ReportRow],
    format: ReportFormat,
    mut out: impl Write,
) -> std::io::Result<()> {
    match format {
        ReportFormat::Csv => {
            writeln!(out, "{}", CSV_COLUMNS.join(","))?;
            for r in rows {
                writeln!(out, "{}", r.csv_line())?;
            }
        }
        ReportFormat::Json => {
            let report = JsonReport {
                records: rows.to_vec(),
            };
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn write_report_file(
    rows: &[ReportRow],
    format: ReportFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut out = std::io::BufWriter::new(file);
    write_report(rows, format, &mut out).map_err(io_err)?;
    out.flush().map_err(io_err)
}

/// Reads a report in either format; JSON is recognised by a leading `{`.
pub fn read_report(path: impl AsRef<Path>) -> Result<Vec<ReportRow>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if text.trim_start().starts_with('{') {
        let report: JsonReport = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        return Ok(report.records);
    }

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .quoting(false)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?
        .clone();
    if header.iter().ne(CSV_COLUMNS) {
        return Err(Error::Report {
            path: path.to_path_buf(),
            message: format!(
                "unexpected header `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    reader
        .deserialize()
        .map(|row| {
            row.map_err(|source| Error::Csv {
                path: path.to_path_buf(),
                source,
            })
        })
        .collect()
}

pub const SUMMARY_COLUMNS: [&str; 8] = [
    "dataset", "triples", "S_min", "S_median", "S_max", "t_median", "rho", "p_value",
];

/// Summary table as CSV; absent correlations print as `--`.
pub fn format_summary_table(rows: &[(String, DatasetSummary)]) -> String {
    let mut out = SUMMARY_COLUMNS.join(",");
    out.push('\n');
    for (name, s) in rows {
        let (rho, p) = match s.correlation {
            Some(c) => (format_sig(c.rho, 3), format_sig(c.p_value, 3)),
            None => ("--".into(), "--".into()),
        };
        out.push_str(
            &[
                name.clone(),
                s.triple_count.to_string(),
                format_sig6(s.s_min),
                format_sig6(s.s_median),
                format_sig6(s.s_max),
                format_sig6(s.t_median),
                rho,
                p,
            ]
            .join(","),
        );
        out.push('\n');
    }
    out
}
