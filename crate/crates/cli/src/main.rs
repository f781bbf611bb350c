//! `twotier`: fit two-tier trees, scan for interfering features and
//! summarise scan reports.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 I/O error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use twotier_core::crossval::ComplementPolicy;
use twotier_core::data::Task;
use twotier_core::report::ReportFormat;
use twotier_core::scoring::FloorScope;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "twotier",
    version,
    about = "Interfering-feature analysis for greedy two-tier decision trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the 20-row synthetic interference table as CSV.
    Synth {
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit one two-tier tree on every row and print it with its score.
    Fit(FitArgs),
    /// Scan all feature triples for significant interference.
    Scan(ScanArgs),
    /// Summarise one or more scan reports, plus a pooled ALL row.
    Summarize(SummarizeArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TaskArg {
    Regression,
    Classification,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::Regression => Task::Regression,
            TaskArg::Classification => Task::Classification,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FloorArg {
    Train,
    Full,
}

impl From<FloorArg> for FloorScope {
    fn from(f: FloorArg) -> Self {
        match f {
            FloorArg::Train => FloorScope::Train,
            FloorArg::Full => FloorScope::Full,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ComplementArg {
    CvMean,
    FullData,
}

impl From<ComplementArg> for ComplementPolicy {
    fn from(c: ComplementArg) -> Self {
        match c {
            ComplementArg::CvMean => ComplementPolicy::CvMean,
            ComplementArg::FullData => ComplementPolicy::FullData,
        }
    }
}

#[derive(Debug, Args)]
struct DatasetArgs {
    /// Comma-separated numeric table with a header row.
    #[arg(long)]
    input: PathBuf,
    /// Name of the target column.
    #[arg(long)]
    target: String,
    #[arg(long, value_enum, default_value = "regression")]
    task: TaskArg,
    /// Keep rows with LO <= FEATURE < HI, written FEATURE:LO:HI.
    #[arg(long, value_name = "FEATURE:LO:HI")]
    filter: Option<String>,
    /// Rows the majority-class floor is counted on (classification).
    #[arg(long, value_enum, default_value = "train")]
    floor_scope: FloorArg,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    data: DatasetArgs,
    /// Features the tree may use, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    features: Vec<String>,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[command(flatten)]
    data: DatasetArgs,
    /// Number of seeded train/test partitions R.
    #[arg(long, default_value_t = 1000)]
    splits: usize,
    /// Partition j uses seed SEED_BASE + j for j = 1..R.
    #[arg(long, default_value_t = 0)]
    seed_base: u64,
    #[arg(long, default_value_t = 0.7)]
    train_fraction: f64,
    /// Two-sided level of the mean-score confidence intervals.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// How pair complementarity is decided.
    #[arg(long, value_enum, default_value = "cv-mean")]
    complement: ComplementArg,
}

#[derive(Debug, Args)]
struct SummarizeArgs {
    /// Scan reports (CSV or JSON).
    #[arg(required = true)]
    reports: Vec<PathBuf>,
    /// Also write the summary table to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth { out } => commands::synth(&out),
        Command::Fit(args) => commands::fit(args),
        Command::Scan(args) => commands::scan(args),
        Command::Summarize(args) => commands::summarize(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("twotier: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
