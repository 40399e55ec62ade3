use std::path::PathBuf;

use chrono::NaiveDate;
use clap::builder::BoolishValueParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use sigmarev_core::screener::{
    NormalitySample, DEFAULT_ALPHA, DEFAULT_MIN_HISTORY, DEFAULT_STALENESS,
};
use sigmarev_core::signal::{DEFAULT_K, DEFAULT_WINDOW};
use sigmarev_core::{BandConfig, PriceField, ReturnMode};

pub const DEFAULT_ENDPOINT: &str = "https://query1.finance.yahoo.com/v7/finance/download/{ticker}?period1={from_epoch}&period2={to_epoch}&interval=1d&events=history";

#[derive(Debug, Parser)]
#[command(
    name = "sigmarev",
    version,
    about = "Daily-return band signals, normality checks and backtests over OHLC price files"
)]
pub struct Cli {
    /// Pin generated_at to the Unix epoch so reports are byte-stable.
    #[arg(long, global = true, env = "SIGMAREV_DETERMINISTIC", value_parser = BoolishValueParser::new())]
    pub deterministic: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Download daily bars and save them as CSV.
    Fetch(FetchArgs),
    /// Normality test, latest band decision and return statistics for one file.
    Analyze(AnalyzeArgs),
    /// Correlation of two files' date-aligned daily returns.
    Correlate(CorrelateArgs),
    /// Replay the band rule over one or more files.
    Backtest(BacktestArgs),
    /// Scan a ticker universe for today's candidates.
    Screen(ScreenArgs),
    /// Print the default settings and their environment variables.
    Config,
}

#[derive(Debug, Args)]
pub struct FetchArgs {
    pub ticker: String,
    #[arg(long, env = "SIGMAREV_FROM")]
    pub from: NaiveDate,
    #[arg(long, env = "SIGMAREV_TO")]
    pub to: NaiveDate,
    /// URL template with {ticker}, {from}/{to} or {from_epoch}/{to_epoch}.
    #[arg(long, env = "SIGMAREV_ENDPOINT", default_value = DEFAULT_ENDPOINT)]
    pub endpoint: String,
    /// Output file; defaults to TICKER.csv in the working directory.
    #[arg(long, env = "SIGMAREV_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Simple,
    Ratio,
}

impl From<ModeArg> for ReturnMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Simple => ReturnMode::Simple,
            ModeArg::Ratio => ReturnMode::Ratio,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleArg {
    Window,
    Full,
    BinBreaks,
}

impl From<SampleArg> for NormalitySample {
    fn from(s: SampleArg) -> Self {
        match s {
            SampleArg::Window => NormalitySample::Window,
            SampleArg::Full => NormalitySample::FullHistory,
            SampleArg::BinBreaks => NormalitySample::BinBreaks,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Table,
    /// JSON on stdout, table on stderr.
    Both,
}

/// Settings shared by every command that computes returns.
#[derive(Debug, Clone, Args)]
pub struct ReturnArgs {
    #[arg(long, value_enum, env = "SIGMAREV_MODE", default_value = "simple")]
    pub mode: ModeArg,
    /// Use the Adj Close column instead of Close.
    #[arg(long, env = "SIGMAREV_ADJUSTED", value_parser = BoolishValueParser::new())]
    pub adjusted: bool,
}

impl ReturnArgs {
    pub fn field(&self) -> PriceField {
        if self.adjusted {
            PriceField::AdjClose
        } else {
            PriceField::Close
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BandArgs {
    /// Trailing returns used for σ.
    #[arg(long, env = "SIGMAREV_WINDOW", default_value_t = DEFAULT_WINDOW)]
    pub window: usize,
    /// Band half-width in units of σ.
    #[arg(long, env = "SIGMAREV_K", default_value_t = DEFAULT_K)]
    pub k: f64,
    /// Consecutive-return pairs averaged into the momentum slope.
    #[arg(long, env = "SIGMAREV_MOMENTUM_PAIRS", default_value_t = 1)]
    pub momentum_pairs: usize,
    /// Go short instead of long after an upside breach.
    #[arg(long, env = "SIGMAREV_SHORT_POSITIVE_BREACH", value_parser = BoolishValueParser::new())]
    pub short_positive_breach: bool,
    #[command(flatten)]
    pub returns: ReturnArgs,
}

impl BandArgs {
    pub fn config(&self) -> BandConfig {
        BandConfig {
            window: self.window,
            k: self.k,
            mode: self.returns.mode.into(),
            momentum_pairs: self.momentum_pairs,
            short_positive_breach: self.short_positive_breach,
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub csv: PathBuf,
    #[command(flatten)]
    pub band: BandArgs,
    #[arg(long, env = "SIGMAREV_ALPHA", default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Returns fed to the normality test: every return, the trailing
    /// window before the latest date, or histogram breaks of every return.
    #[arg(
        long,
        value_enum,
        env = "SIGMAREV_NORMALITY_SAMPLE",
        default_value = "full"
    )]
    pub normality_sample: SampleArg,
    /// Write density, QQ and band CSV files.
    #[arg(long, env = "SIGMAREV_EMIT_PLOTS", value_parser = BoolishValueParser::new())]
    pub emit_plots: bool,
    /// Directory for plot files; defaults to the input file's directory.
    #[arg(long, env = "SIGMAREV_PLOTS_DIR")]
    pub plots_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    pub csv_a: PathBuf,
    pub csv_b: PathBuf,
    #[command(flatten)]
    pub returns: ReturnArgs,
}

#[derive(Debug, Args)]
pub struct BacktestArgs {
    #[arg(required = true)]
    pub csvs: Vec<PathBuf>,
    #[command(flatten)]
    pub band: BandArgs,
    /// Also write every trigger event to this CSV file.
    #[arg(long, env = "SIGMAREV_EVENTS_CSV")]
    pub events_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScreenArgs {
    /// One ticker per line; '#' starts a comment.
    pub manifest: PathBuf,
    /// Directory holding TICKER.csv files; defaults to the manifest's directory.
    #[arg(long, env = "SIGMAREV_DATA_DIR")]
    pub data_dir: Option<PathBuf>,
    #[command(flatten)]
    pub band: BandArgs,
    #[arg(long, env = "SIGMAREV_ALPHA", default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(
        long,
        value_enum,
        env = "SIGMAREV_NORMALITY_SAMPLE",
        default_value = "window"
    )]
    pub normality_sample: SampleArg,
    /// Minimum bars per ticker.
    #[arg(long, env = "SIGMAREV_MIN_HISTORY", default_value_t = DEFAULT_MIN_HISTORY)]
    pub min_history: usize,
    /// Trading days a ticker's last bar may trail the scan date.
    #[arg(long, env = "SIGMAREV_STALENESS", default_value_t = DEFAULT_STALENESS)]
    pub staleness: usize,
    /// Scan date; defaults to the newest last bar in the universe.
    #[arg(long, env = "SIGMAREV_AS_OF")]
    pub as_of: Option<NaiveDate>,
    #[arg(long, value_enum, env = "SIGMAREV_FORMAT", default_value = "json")]
    pub format: FormatArg,
}
