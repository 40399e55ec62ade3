// Seeded synthetic data shared by the integration tests. Kept out of the
// library on purpose: production code never fabricates prices.
#![allow(dead_code)]

use std::path::PathBuf;

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StudentT};
use sigmarev_core::calendar::weekdays_from;
use sigmarev_core::{OhlcBar, PriceSeries, ReturnMode, ReturnPoint, ReturnSeries, Ticker};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(rel)
}

pub fn start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2010, 1, 4).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng, n: usize, sd: f64) -> Vec<f64> {
    let d = Normal::new(0.0, sd).unwrap();
    (0..n).map(|_| d.sample(rng)).collect()
}

/// Student-t draws rescaled to unit variance, then to `sd`.
pub fn student_t(rng: &mut impl Rng, n: usize, dof: f64, sd: f64) -> Vec<f64> {
    let d = StudentT::new(dof).unwrap();
    let scale = sd / (dof / (dof - 2.0)).sqrt();
    (0..n).map(|_| d.sample(rng) * scale).collect()
}

pub fn return_series(name: &str, values: &[f64]) -> ReturnSeries {
    let dates = weekdays_from(start(), values.len());
    let points = dates
        .into_iter()
        .zip(values)
        .map(|(date, &value)| ReturnPoint { date, value })
        .collect();
    ReturnSeries::new(Ticker::new(name).unwrap(), ReturnMode::Simple, points).unwrap()
}

/// Price path whose closes compound the given simple returns from 100.
pub fn price_series(name: &str, returns: &[f64], first: NaiveDate) -> PriceSeries {
    let dates = weekdays_from(first, returns.len() + 1);
    let mut close = 100.0;
    let mut bars = Vec::with_capacity(dates.len());
    for (i, date) in dates.into_iter().enumerate() {
        if i > 0 {
            close *= 1.0 + returns[i - 1];
        }
        bars.push(OhlcBar {
            date,
            open: close,
            high: close,
            low: close,
            close,
            adj_close: close,
            volume: 1_000_000,
        });
    }
    PriceSeries::new(Ticker::new(name).unwrap(), bars).unwrap()
}
