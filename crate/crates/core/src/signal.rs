//! The rolling `k·σ` band rule and the momentum forecast.
//!
//! For each date, σ is the sample standard deviation of the `window` returns
//! strictly before it, so a decision never sees its own day or anything
//! later. A day whose return deviates from flat by more than `k·σ` triggers a
//! next-day long, whichever side the band was breached on.
//!
//! Momentum is the finite-difference slope of the return series in
//! trading-day units, `M = (R_2 - R_1) / (t_2 - t_1)`, and the next-day
//! forecast is the linear extrapolation `R_1 = M·t + R_0` with `t = 1`.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::returns::{ReturnMode, ReturnSeries};
use crate::stats::{self, CompensatedSum};

pub const DEFAULT_WINDOW: usize = 252;
pub const DEFAULT_K: f64 = 2.0;
/// Smallest window [`BandConfig::validate`] accepts.
pub const MIN_CONFIG_WINDOW: usize = 30;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("insufficient data: need at least {required} returns, have {actual}")]
    InsufficientData { required: usize, actual: usize },
    #[error("date {0} not in the return series")]
    UnknownDate(NaiveDate),
    #[error("insufficient history at {date}: need {required} earlier returns, have {available}")]
    InsufficientHistory {
        date: NaiveDate,
        required: usize,
        available: usize,
    },
    #[error("zero variance in the window before {0}")]
    ZeroVariance(NaiveDate),
    #[error("invalid band configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandConfig {
    pub window: usize,
    pub k: f64,
    pub mode: ReturnMode,
    /// Consecutive-return pairs averaged into the momentum slope.
    pub momentum_pairs: usize,
    /// Experimental variant: go short after an upside breach.
    pub short_positive_breach: bool,
}

impl Default for BandConfig {
    fn default() -> Self {
        BandConfig {
            window: DEFAULT_WINDOW,
            k: DEFAULT_K,
            mode: ReturnMode::Simple,
            momentum_pairs: 1,
            short_positive_breach: false,
        }
    }
}

impl BandConfig {
    /// Rejects user-facing configurations outside `window >= 30`, `k > 0`.
    /// The library functions themselves only need `window >= 2`.
    pub fn validate(&self) -> Result<(), SignalError> {
        if self.window < MIN_CONFIG_WINDOW {
            return Err(SignalError::InvalidConfig(format!(
                "window {} below {MIN_CONFIG_WINDOW}",
                self.window
            )));
        }
        self.check_basic()
    }

    pub(crate) fn check_basic(&self) -> Result<(), SignalError> {
        if self.window < 2 {
            return Err(SignalError::InvalidConfig(format!(
                "window {} below 2",
                self.window
            )));
        }
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(SignalError::InvalidConfig(format!(
                "k must be positive, got {}",
                self.k
            )));
        }
        if self.momentum_pairs == 0 {
            return Err(SignalError::InvalidConfig(
                "momentum_pairs must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    LongNextDay,
    ShortNextDay,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumEstimate {
    pub slope_m: f64,
    pub r0: f64,
    pub r1_forecast: f64,
    /// Forecast horizon in trading days.
    pub t_span: f64,
    pub lookback_pairs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalDecision {
    pub date: NaiveDate,
    pub today_return: f64,
    pub sigma: f64,
    pub band: f64,
    pub triggered: bool,
    pub direction: Direction,
    /// `(flat, flat + band)` when triggered.
    pub expected_range: Option<(f64, f64)>,
    pub momentum: MomentumEstimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaPoint {
    pub date: NaiveDate,
    pub sigma: f64,
}

/// Sample σ of `values[idx - window .. idx]`.
pub(crate) fn trailing_sigma(values: &[f64], idx: usize, window: usize) -> f64 {
    let sample = &values[idx - window..idx];
    let m = stats::mean(sample);
    let ss = sample
        .iter()
        .map(|x| (x - m) * (x - m))
        .collect::<CompensatedSum>()
        .value();
    (ss / (window - 1) as f64).sqrt()
}

/// σ for every date with at least `window` earlier returns.
pub fn rolling_sigma(
    returns: &ReturnSeries,
    config: &BandConfig,
) -> Result<Vec<SigmaPoint>, SignalError> {
    config.check_basic()?;
    let values = returns.values();
    if values.len() < config.window + 1 {
        return Err(SignalError::InsufficientData {
            required: config.window + 1,
            actual: values.len(),
        });
    }
    Ok((config.window..values.len())
        .map(|i| SigmaPoint {
            date: returns.points()[i].date,
            sigma: trailing_sigma(&values, i, config.window),
        })
        .collect())
}

pub fn evaluate_signal(
    returns: &ReturnSeries,
    date: NaiveDate,
    config: &BandConfig,
) -> Result<SignalDecision, SignalError> {
    config.check_basic()?;
    let idx = returns
        .position(date)
        .ok_or(SignalError::UnknownDate(date))?;
    let values = returns.values();
    decide(&values, idx, date, returns.mode(), config)
}

/// Decision at index `idx` of `values`; shared by the public entry points.
pub(crate) fn decide(
    values: &[f64],
    idx: usize,
    date: NaiveDate,
    mode: ReturnMode,
    config: &BandConfig,
) -> Result<SignalDecision, SignalError> {
    if idx < config.window {
        return Err(SignalError::InsufficientHistory {
            date,
            required: config.window,
            available: idx,
        });
    }
    let sigma = trailing_sigma(values, idx, config.window);
    if sigma == 0.0 {
        return Err(SignalError::ZeroVariance(date));
    }
    let flat = mode.baseline();
    let today = values[idx];
    let excess = today - flat;
    let band = config.k * sigma;
    let triggered = excess.abs() > band;
    let direction = match (triggered, config.short_positive_breach && excess > 0.0) {
        (false, _) => Direction::None,
        (true, true) => Direction::ShortNextDay,
        (true, false) => Direction::LongNextDay,
    };
    let momentum = momentum_at(values, idx, date, config.momentum_pairs.min(idx))?;
    Ok(SignalDecision {
        date,
        today_return: today,
        sigma,
        band,
        triggered,
        direction,
        expected_range: triggered.then_some((flat, flat + band)),
        momentum,
    })
}

pub fn momentum_estimate(
    returns: &ReturnSeries,
    date: NaiveDate,
    lookback_pairs: usize,
) -> Result<MomentumEstimate, SignalError> {
    if lookback_pairs == 0 {
        return Err(SignalError::InvalidConfig(
            "lookback_pairs must be at least 1".into(),
        ));
    }
    let idx = returns
        .position(date)
        .ok_or(SignalError::UnknownDate(date))?;
    momentum_at(&returns.values(), idx, date, lookback_pairs)
}

fn momentum_at(
    values: &[f64],
    idx: usize,
    date: NaiveDate,
    pairs: usize,
) -> Result<MomentumEstimate, SignalError> {
    if pairs == 0 || idx < pairs {
        return Err(SignalError::InsufficientHistory {
            date,
            required: pairs.max(1),
            available: idx,
        });
    }
    // Mean of consecutive differences; each pair is one trading day apart.
    let slope = values[idx - pairs..=idx]
        .windows(2)
        .map(|w| w[1] - w[0])
        .collect::<CompensatedSum>()
        .value()
        / pairs as f64;
    let r0 = values[idx];
    let t_span = 1.0;
    Ok(MomentumEstimate {
        slope_m: slope,
        r0,
        r1_forecast: slope * t_span + r0,
        t_span,
        lookback_pairs: pairs,
    })
}
