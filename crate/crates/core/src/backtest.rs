//! Replays the band rule over history and records what happened the next
//! trading day.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::market_data::Ticker;
use crate::returns::ReturnSeries;
use crate::signal::{decide, trailing_sigma, BandConfig, SignalError};
use crate::stats::CompensatedSum;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BacktestError {
    #[error("no series is long enough for a single evaluation (window {window})")]
    InsufficientData { window: usize },
    #[error(transparent)]
    Signal(#[from] SignalError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriggerEvent {
    pub ticker: Ticker,
    pub trigger_date: NaiveDate,
    pub trigger_return: f64,
    pub band: f64,
    pub next_date: NaiveDate,
    pub next_return: f64,
    pub reverted_positive: bool,
    pub within_expected_range: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickerBreakdown {
    pub ticker: Ticker,
    pub evaluated_days: usize,
    pub n_triggers: usize,
    pub n_positive: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_positive: Option<f64>,
    pub open_triggers: usize,
    pub zero_sigma_days: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestReport {
    pub config: BandConfig,
    /// Triggers on consecutive days each count as a separate event.
    pub overlap_policy: String,
    pub events: Vec<TriggerEvent>,
    pub n_triggers: usize,
    /// Triggers on a series' final date, excluded from the aggregates.
    pub open_triggers: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_positive: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_within_range: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_next_return: Option<f64>,
    pub per_ticker: Vec<TickerBreakdown>,
    /// Tickers too short for even one evaluation.
    pub unevaluable: Vec<Ticker>,
}

pub const OVERLAP_POLICY: &str = "independent";

struct TickerRun {
    events: Vec<TriggerEvent>,
    breakdown: TickerBreakdown,
}

fn scan(series: &ReturnSeries, config: &BandConfig) -> Result<TickerRun, SignalError> {
    let values = series.values();
    let points = series.points();
    let flat = series.mode().baseline();
    let mut events = Vec::new();
    let mut breakdown = TickerBreakdown {
        ticker: series.ticker().clone(),
        evaluated_days: 0,
        n_triggers: 0,
        n_positive: 0,
        p_positive: None,
        open_triggers: 0,
        zero_sigma_days: 0,
    };
    for idx in config.window..values.len() {
        let decision = match decide(&values, idx, points[idx].date, series.mode(), config) {
            Ok(d) => d,
            Err(SignalError::ZeroVariance(_)) => {
                breakdown.zero_sigma_days += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        breakdown.evaluated_days += 1;
        if !decision.triggered {
            continue;
        }
        let Some(next) = points.get(idx + 1) else {
            breakdown.open_triggers += 1;
            continue;
        };
        let next_excess = next.value - flat;
        events.push(TriggerEvent {
            ticker: series.ticker().clone(),
            trigger_date: decision.date,
            trigger_return: decision.today_return,
            band: decision.band,
            next_date: next.date,
            next_return: next.value,
            reverted_positive: next_excess > 0.0,
            within_expected_range: next_excess > 0.0 && next_excess <= decision.band,
        });
    }
    breakdown.n_triggers = events.len();
    breakdown.n_positive = events.iter().filter(|e| e.reverted_positive).count();
    breakdown.p_positive = ratio(breakdown.n_positive, breakdown.n_triggers);
    Ok(TickerRun { events, breakdown })
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

#[cfg(feature = "parallel")]
fn scan_all(serieses: &[ReturnSeries], config: &BandConfig) -> Result<Vec<TickerRun>, SignalError> {
    use rayon::prelude::*;
    serieses
        .par_iter()
        .filter(|s| s.len() > config.window)
        .map(|s| scan(s, config))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn scan_all(serieses: &[ReturnSeries], config: &BandConfig) -> Result<Vec<TickerRun>, SignalError> {
    serieses
        .iter()
        .filter(|s| s.len() > config.window)
        .map(|s| scan(s, config))
        .collect()
}

/// Runs the rule over every series and pools the next-day outcomes.
/// Deterministic: events are sorted by `(ticker, trigger_date)` and all
/// aggregates are folded in that order.
pub fn run_backtest(
    serieses: &[ReturnSeries],
    config: &BandConfig,
) -> Result<BacktestReport, BacktestError> {
    config.check_basic()?;
    let runs = scan_all(serieses, config)?;
    if runs.is_empty() {
        return Err(BacktestError::InsufficientData {
            window: config.window,
        });
    }
    let mut unevaluable: Vec<Ticker> = serieses
        .iter()
        .filter(|s| s.len() <= config.window)
        .map(|s| s.ticker().clone())
        .collect();
    unevaluable.sort();

    let mut per_ticker = Vec::with_capacity(runs.len());
    let mut events = Vec::new();
    for run in runs {
        per_ticker.push(run.breakdown);
        events.extend(run.events);
    }
    per_ticker.sort_by(|a, b| a.ticker.cmp(&b.ticker));
    events.sort_by(|a, b| (&a.ticker, a.trigger_date).cmp(&(&b.ticker, b.trigger_date)));

    let n = events.len();
    let positive = events.iter().filter(|e| e.reverted_positive).count();
    let within = events.iter().filter(|e| e.within_expected_range).count();
    let mean_next = (n > 0).then(|| {
        events
            .iter()
            .map(|e| e.next_return)
            .collect::<CompensatedSum>()
            .value()
            / n as f64
    });
    Ok(BacktestReport {
        config: *config,
        overlap_policy: OVERLAP_POLICY.to_string(),
        n_triggers: n,
        open_triggers: per_ticker.iter().map(|t| t.open_triggers).sum(),
        p_positive: ratio(positive, n),
        p_within_range: ratio(within, n),
        mean_next_return: mean_next,
        events,
        per_ticker,
        unevaluable,
    })
}

/// Share of evaluable days whose return falls outside the `k·σ` band. Days
/// with zero trailing variance have no band and are not evaluable.
pub fn outside_band_fraction(
    returns: &ReturnSeries,
    config: &BandConfig,
) -> Result<f64, BacktestError> {
    config.check_basic()?;
    let values = returns.values();
    let flat = returns.mode().baseline();
    let mut evaluable = 0usize;
    let mut outside = 0usize;
    for idx in config.window..values.len() {
        let sigma = trailing_sigma(&values, idx, config.window);
        if sigma == 0.0 {
            continue;
        }
        evaluable += 1;
        if (values[idx] - flat).abs() > config.k * sigma {
            outside += 1;
        }
    }
    ratio(outside, evaluable).ok_or(BacktestError::InsufficientData {
        window: config.window,
    })
}
