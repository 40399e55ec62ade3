//! Browser bindings for the demo page in `www/`. Each exported function
//! returns a JSON string the page draws on a canvas. The `*_json` functions
//! hold the logic so native tests can call them without a JS runtime.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal, StudentT, Uniform};
use serde::Serialize;
use serde_json::json;
use sigmarev_core::normality::{HistogramBin, QqPlotData};
use sigmarev_core::{
    daily_returns, density_histogram, outside_band_fraction, parse_csv, qq_plot_data,
    rolling_sigma, run_backtest, sample_stats, shapiro_wilk, BandConfig, BinRule, PriceSeries,
    ReturnMode, ReturnSeries, Ticker,
};
use wasm_bindgen::prelude::*;

const FIXTURES: [(&str, &str); 3] = [
    ("AAPLH", include_str!("../../../fixtures/prices/AAPLH.csv")),
    ("RIMMH", include_str!("../../../fixtures/prices/RIMMH.csv")),
    ("YHOOH", include_str!("../../../fixtures/prices/YHOOH.csv")),
];

const MAX_SAMPLE: usize = 5000;

fn fixture(name: &str) -> Result<PriceSeries, String> {
    let (_, csv) = FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| format!("unknown fixture {name}"))?;
    parse_csv(Ticker::new(name).map_err(|e| e.to_string())?, csv).map_err(|e| e.to_string())
}

fn returns_of(series: &PriceSeries) -> Result<ReturnSeries, String> {
    daily_returns(series, ReturnMode::Simple).map_err(|e| e.to_string())
}

fn band(window: usize, k: f64) -> Result<BandConfig, String> {
    let config = BandConfig {
        window,
        k,
        ..BandConfig::default()
    };
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

/// Draws `n` values from a named distribution with a fixed seed.
pub fn draw(distribution: &str, n: usize, seed: u32) -> Result<Vec<f64>, String> {
    if !(3..=MAX_SAMPLE).contains(&n) {
        return Err(format!("sample size must lie in 3..={MAX_SAMPLE}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.into());
    let xs = match distribution {
        "normal" => (0..n).map(|_| StandardNormal.sample(&mut rng)).collect(),
        "student_t3" => {
            let t = StudentT::new(3.0).map_err(|e| e.to_string())?;
            (0..n).map(|_| t.sample(&mut rng)).collect()
        }
        "exponential" => (0..n).map(|_| Exp1.sample(&mut rng)).collect(),
        "uniform" => {
            let u = Uniform::new(-1.0, 1.0).map_err(|e| e.to_string())?;
            (0..n).map(|_| u.sample(&mut rng)).collect()
        }
        other => return Err(format!("unknown distribution {other}")),
    };
    Ok(xs)
}

#[derive(Serialize)]
struct NormalityView<'a> {
    n: usize,
    mean: f64,
    std_dev: f64,
    w: f64,
    p_value: f64,
    reject_normality: bool,
    qq: &'a QqPlotData,
    histogram: &'a [HistogramBin],
}

pub fn normality_json(xs: &[f64], alpha: f64) -> Result<String, String> {
    let stats = sample_stats(xs).map_err(|e| e.to_string())?;
    let report = shapiro_wilk(xs, alpha).map_err(|e| e.to_string())?;
    let qq = qq_plot_data(xs).map_err(|e| e.to_string())?;
    let histogram = density_histogram(xs, BinRule::Sturges).map_err(|e| e.to_string())?;
    let view = NormalityView {
        n: report.n,
        mean: stats.mean,
        std_dev: stats.std_dev,
        w: report.w,
        p_value: report.p_value,
        reject_normality: report.reject_normality,
        qq: &qq,
        histogram: &histogram,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

pub fn bands_json(ticker: &str, window: usize, k: f64) -> Result<String, String> {
    let config = band(window, k)?;
    let returns = returns_of(&fixture(ticker)?)?;
    let sigmas = rolling_sigma(&returns, &config).map_err(|e| e.to_string())?;
    let offset = returns.len() - sigmas.len();
    let points = &returns.points()[offset..];
    let triggers: Vec<usize> = points
        .iter()
        .zip(&sigmas)
        .enumerate()
        .filter(|(_, (p, s))| s.sigma > 0.0 && p.value.abs() > k * s.sigma)
        .map(|(i, _)| i)
        .collect();
    let value = json!({
        "ticker": ticker,
        "dates": points.iter().map(|p| p.date.to_string()).collect::<Vec<_>>(),
        "returns": points.iter().map(|p| p.value).collect::<Vec<_>>(),
        "sigma": sigmas.iter().map(|s| s.sigma).collect::<Vec<_>>(),
        "triggers": triggers,
        "outside_fraction": outside_band_fraction(&returns, &config).map_err(|e| e.to_string())?,
    });
    Ok(value.to_string())
}

pub fn backtest_json(tickers: &[&str], window: usize, k: f64) -> Result<String, String> {
    let config = band(window, k)?;
    let serieses = tickers
        .iter()
        .map(|t| fixture(t).and_then(|s| returns_of(&s)))
        .collect::<Result<Vec<_>, String>>()?;
    let report = run_backtest(&serieses, &config).map_err(|e| e.to_string())?;
    let value = json!({
        "n_triggers": report.n_triggers,
        "open_triggers": report.open_triggers,
        "p_positive": report.p_positive,
        "p_within_range": report.p_within_range,
        "mean_next_return": report.mean_next_return,
        "per_ticker": report.per_ticker,
        "next_returns": report.events.iter().map(|e| e.next_return).collect::<Vec<_>>(),
    });
    Ok(value.to_string())
}

fn js<T>(r: Result<T, String>) -> Result<T, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn fixture_names() -> String {
    serde_json::to_string(&FIXTURES.iter().map(|(n, _)| *n).collect::<Vec<_>>()).unwrap_or_default()
}

/// Seeded sample from `distribution` tested for normality.
#[wasm_bindgen]
pub fn normality_demo(
    distribution: &str,
    n: usize,
    seed: u32,
    alpha: f64,
) -> Result<String, JsValue> {
    js(draw(distribution, n, seed).and_then(|xs| normality_json(&xs, alpha)))
}

#[wasm_bindgen]
pub fn band_demo(ticker: &str, window: usize, k: f64) -> Result<String, JsValue> {
    js(bands_json(ticker, window, k))
}

/// `tickers` is a comma-separated list of bundled fixture names.
#[wasm_bindgen]
pub fn backtest_demo(tickers: &str, window: usize, k: f64) -> Result<String, JsValue> {
    let names: Vec<&str> = tickers
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    js(backtest_json(&names, window, k))
}
