//! Daily-return analytics for mean-reversion trading on OHLC price history.
//!
//! The pipeline runs in this order:
//!
//! 1. [`market_data`] ingests seven-column Yahoo-style CSV files into a
//!    [`PriceSeries`].
//! 2. [`returns`] turns closes into a dated [`ReturnSeries`].
//! 3. [`stats`] has the sample moments, correlation and standard score.
//! 4. [`normality`] runs the Shapiro-Wilk test and builds QQ and density plot data.
//! 5. [`signal`] applies the rolling `k·σ` band rule and the momentum forecast.
//! 6. [`backtest`] replays the rule over history and measures next-day outcomes.
//! 7. [`screener`] filters a ticker universe down to today's candidates.

pub mod backtest;
pub mod calendar;
pub mod export;
pub mod market_data;
pub mod normality;
pub mod returns;
pub mod screener;
pub mod signal;
pub mod stats;

pub use backtest::{
    outside_band_fraction, run_backtest, BacktestError, BacktestReport, TriggerEvent,
};
pub use market_data::{
    fetch_remote, parse_csv, save_series, DataError, OhlcBar, PriceField, PriceSeries, Ticker,
    Transport, TransportError,
};
pub use normality::{
    density_histogram, qq_plot_data, shapiro_wilk, BinRule, HistogramBin, NormalityError,
    NormalityReport, QqPlotData,
};
pub use returns::{daily_returns, ReturnMode, ReturnPoint, ReturnSeries, ReturnsError};
pub use screener::{screen, ScreenConfig, ScreenError, ScreenResult, SkipReason};
pub use signal::{
    evaluate_signal, momentum_estimate, rolling_sigma, BandConfig, Direction, MomentumEstimate,
    SignalDecision, SignalError,
};
pub use stats::{
    align_by_date, correlation, covariance, sample_stats, standard_score, SampleStats,
    StandardScore, StatsError,
};
