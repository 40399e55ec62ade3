use chrono::{NaiveDate, SecondsFormat, Utc};
use serde::Serialize;
use sigmarev_core::normality::NormalitySummary;
use sigmarev_core::screener::NormalitySample;
use sigmarev_core::{
    BacktestReport, PriceField, ReturnMode, SampleStats, ScreenResult, SignalDecision, Ticker,
};

/// Bumped on any change to the report layout; see schema/report.schema.json.
pub const SCHEMA_VERSION: &str = "1.0.0";
pub const PINNED_TIMESTAMP: &str = "1970-01-01T00:00:00Z";

#[derive(Debug, Serialize)]
pub struct ReportEnvelope {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub generated_at: String,
    pub payload: Payload,
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Analysis(Box<Analysis>),
    Correlation(Correlation),
    Backtest(Box<BacktestReport>),
    Screen(ScreenResult),
}

impl Payload {
    fn command(&self) -> &'static str {
        match self {
            Payload::Analysis(_) => "analyze",
            Payload::Correlation(_) => "correlate",
            Payload::Backtest(_) => "backtest",
            Payload::Screen(_) => "screen",
        }
    }
}

impl ReportEnvelope {
    pub fn new(payload: Payload, deterministic: bool) -> Self {
        let generated_at = if deterministic {
            PINNED_TIMESTAMP.to_string()
        } else {
            Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true)
        };
        ReportEnvelope {
            schema_version: SCHEMA_VERSION,
            command: payload.command(),
            generated_at,
            payload,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report types serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Serialize)]
pub struct Analysis {
    pub ticker: Ticker,
    pub first_date: NaiveDate,
    pub last_date: NaiveDate,
    pub n_bars: usize,
    pub mode: ReturnMode,
    pub price_field: PriceField,
    pub return_stats: SampleStats,
    pub normality_sample: NormalitySample,
    pub normality: NormalitySummary,
    pub signal: SignalDecision,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub plot_files: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct Correlation {
    pub left: Ticker,
    pub right: Ticker,
    pub mode: ReturnMode,
    pub price_field: PriceField,
    pub n_aligned: usize,
    pub first_date: NaiveDate,
    pub last_date: NaiveDate,
    pub covariance: f64,
    pub correlation: f64,
}
