//! Universe scan: which tickers breach their band today on a return sample
//! that still looks normal.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calendar::weekdays_between;
use crate::market_data::{PriceField, PriceSeries, Ticker};
use crate::normality::{histogram_breaks, shapiro_wilk, NormalityError, NormalitySummary};
use crate::returns::daily_returns_from;
use crate::signal::{decide, BandConfig, MomentumEstimate, SignalError};

pub const DEFAULT_MIN_HISTORY: usize = 756;
pub const DEFAULT_STALENESS: usize = 5;
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScreenError {
    #[error("empty universe")]
    EmptyUniverse,
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error("significance level {0} outside (0, 1)")]
    InvalidAlpha(f64),
}

/// Which returns the normality gate looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalitySample {
    /// The same trailing window that sets the band.
    #[default]
    Window,
    /// Every return except the one being judged.
    FullHistory,
    /// Histogram bin breaks of the trailing window (compatibility mode).
    BinBreaks,
}

impl std::str::FromStr for NormalitySample {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "window" => Ok(NormalitySample::Window),
            "full" | "full_history" => Ok(NormalitySample::FullHistory),
            "bin-breaks" | "bin_breaks" => Ok(NormalitySample::BinBreaks),
            other => Err(format!(
                "unknown normality sample `{other}` (expected window, full or bin-breaks)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreenConfig {
    pub band: BandConfig,
    pub alpha: f64,
    /// Minimum number of bars per ticker.
    pub min_history: usize,
    /// Maximum weekdays a ticker's last bar may trail `as_of`.
    pub staleness: usize,
    /// Scan date; defaults to the newest last bar in the universe.
    pub as_of: Option<NaiveDate>,
    pub normality_sample: NormalitySample,
    pub price_field: PriceField,
}

impl Default for ScreenConfig {
    fn default() -> Self {
        ScreenConfig {
            band: BandConfig::default(),
            alpha: DEFAULT_ALPHA,
            min_history: DEFAULT_MIN_HISTORY,
            staleness: DEFAULT_STALENESS,
            as_of: None,
            normality_sample: NormalitySample::Window,
            price_field: PriceField::Close,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    InsufficientHistory,
    Stale,
    ZeroVariance,
    DegenerateSample,
    NormalityRejected,
    NotTriggered,
}

impl SkipReason {
    /// Skips caused by the band not being breached, as opposed to a failed
    /// precondition.
    pub fn is_trigger_failure(self) -> bool {
        self == SkipReason::NotTriggered
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub ticker: Ticker,
    pub date: NaiveDate,
    pub today_return: f64,
    pub band: f64,
    pub breach_ratio: f64,
    pub normality: NormalitySummary,
    pub momentum: MomentumEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub ticker: Ticker,
    pub reason: SkipReason,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenResult {
    pub as_of: NaiveDate,
    pub candidates: Vec<Candidate>,
    pub skipped: Vec<Skipped>,
}

enum Outcome {
    Candidate(Candidate),
    Skipped(Skipped),
}

fn skip(ticker: &Ticker, reason: SkipReason, detail: impl Into<String>) -> Outcome {
    Outcome::Skipped(Skipped {
        ticker: ticker.clone(),
        reason,
        detail: detail.into(),
    })
}

fn evaluate(series: &PriceSeries, as_of: NaiveDate, config: &ScreenConfig) -> Outcome {
    let ticker = series.ticker();
    let window = config.band.window;
    let required = config.min_history.max(window + 2);
    let Some(last) = series.last_date() else {
        return skip(ticker, SkipReason::InsufficientHistory, "no bars");
    };
    let lag = weekdays_between(last, as_of);
    if lag > config.staleness {
        return skip(
            ticker,
            SkipReason::Stale,
            format!("last bar {last} is {lag} trading days before {as_of}"),
        );
    }
    if series.len() < required {
        return skip(
            ticker,
            SkipReason::InsufficientHistory,
            format!("{} bars, need {required}", series.len()),
        );
    }
    let returns = match daily_returns_from(series, config.band.mode, config.price_field) {
        Ok(r) => r,
        Err(e) => return skip(ticker, SkipReason::InsufficientHistory, e.to_string()),
    };
    let values = returns.values();
    let idx = values.len() - 1;
    let date = returns.points()[idx].date;

    let decision = match decide(&values, idx, date, returns.mode(), &config.band) {
        Ok(d) => d,
        Err(SignalError::ZeroVariance(_)) => {
            return skip(
                ticker,
                SkipReason::ZeroVariance,
                "constant returns in window",
            )
        }
        Err(e) => return skip(ticker, SkipReason::InsufficientHistory, e.to_string()),
    };

    let sample: Vec<f64> = match config.normality_sample {
        NormalitySample::Window => values[idx - window..idx].to_vec(),
        NormalitySample::FullHistory => values[..idx].to_vec(),
        NormalitySample::BinBreaks => match histogram_breaks(&values[idx - window..idx]) {
            Ok(b) => b,
            Err(e) => return skip(ticker, SkipReason::DegenerateSample, e.to_string()),
        },
    };
    let normality = match shapiro_wilk(&sample, config.alpha) {
        Ok(r) => r.summary(),
        Err(e @ (NormalityError::DegenerateSample | NormalityError::SampleTooSmall(_))) => {
            return skip(ticker, SkipReason::DegenerateSample, e.to_string())
        }
        Err(e) => return skip(ticker, SkipReason::InsufficientHistory, e.to_string()),
    };
    if normality.reject_normality {
        return skip(
            ticker,
            SkipReason::NormalityRejected,
            format!(
                "W = {:.4}, p = {:.3e} < {}",
                normality.w, normality.p_value, config.alpha
            ),
        );
    }
    if !decision.triggered {
        return skip(
            ticker,
            SkipReason::NotTriggered,
            format!(
                "|return| {:.6} within band {:.6}",
                (decision.today_return - returns.mode().baseline()).abs(),
                decision.band
            ),
        );
    }
    let excess = decision.today_return - returns.mode().baseline();
    Outcome::Candidate(Candidate {
        ticker: ticker.clone(),
        date,
        today_return: decision.today_return,
        band: decision.band,
        breach_ratio: excess.abs() / decision.band,
        normality,
        momentum: decision.momentum,
    })
}

#[cfg(feature = "parallel")]
fn evaluate_all(universe: &[PriceSeries], as_of: NaiveDate, config: &ScreenConfig) -> Vec<Outcome> {
    use rayon::prelude::*;
    universe
        .par_iter()
        .map(|s| evaluate(s, as_of, config))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn evaluate_all(universe: &[PriceSeries], as_of: NaiveDate, config: &ScreenConfig) -> Vec<Outcome> {
    universe
        .iter()
        .map(|s| evaluate(s, as_of, config))
        .collect()
}

/// Screens every ticker. Each input lands in exactly one of `candidates` or
/// `skipped`. Candidates are ranked by breach ratio `|r| / band`, largest
/// first; skips are ordered by ticker.
pub fn screen(
    universe: &[PriceSeries],
    config: &ScreenConfig,
) -> Result<ScreenResult, ScreenError> {
    if universe.is_empty() {
        return Err(ScreenError::EmptyUniverse);
    }
    config.band.check_basic()?;
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(ScreenError::InvalidAlpha(config.alpha));
    }
    let as_of = match config.as_of {
        Some(d) => d,
        None => universe
            .iter()
            .filter_map(PriceSeries::last_date)
            .max()
            .unwrap_or_default(),
    };

    let mut candidates = Vec::new();
    let mut skipped = Vec::new();
    for outcome in evaluate_all(universe, as_of, config) {
        match outcome {
            Outcome::Candidate(c) => candidates.push(c),
            Outcome::Skipped(s) => skipped.push(s),
        }
    }
    candidates.sort_by(|a, b| {
        b.breach_ratio
            .total_cmp(&a.breach_ratio)
            .then_with(|| a.ticker.cmp(&b.ticker))
    });
    skipped.sort_by(|a, b| {
        a.ticker
            .cmp(&b.ticker)
            .then_with(|| a.reason.cmp(&b.reason))
    });
    Ok(ScreenResult {
        as_of,
        candidates,
        skipped,
    })
}
