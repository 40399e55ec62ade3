use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::market_data::{PriceField, PriceSeries, Ticker};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReturnsError {
    #[error("insufficient data: need at least {required} points, have {actual}")]
    InsufficientData { required: usize, actual: usize },
    #[error("invalid return series: {0}")]
    InvalidSeries(String),
}

/// `Ratio` is `close_t / close_{t-1}`; `Simple` subtracts one so the series
/// oscillates around zero. All band logic works on the deviation from
/// [`ReturnMode::baseline`], so either mode gives the same decisions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReturnMode {
    Ratio,
    #[default]
    Simple,
}

impl ReturnMode {
    /// Value of a flat day in this mode.
    pub fn baseline(self) -> f64 {
        match self {
            ReturnMode::Ratio => 1.0,
            ReturnMode::Simple => 0.0,
        }
    }
}

impl std::str::FromStr for ReturnMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ratio" => Ok(ReturnMode::Ratio),
            "simple" => Ok(ReturnMode::Simple),
            other => Err(format!(
                "unknown return mode `{other}` (expected simple or ratio)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReturnPoint {
    pub date: NaiveDate,
    pub value: f64,
}

/// Daily returns dated by the later of the two bars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    ticker: Ticker,
    mode: ReturnMode,
    points: Vec<ReturnPoint>,
}

impl ReturnSeries {
    /// Builds a series from precomputed points. Dates must be strictly
    /// increasing and every value must correspond to a positive price ratio.
    pub fn new(
        ticker: Ticker,
        mode: ReturnMode,
        points: Vec<ReturnPoint>,
    ) -> Result<Self, ReturnsError> {
        if let Some(w) = points.windows(2).find(|w| w[0].date >= w[1].date) {
            return Err(ReturnsError::InvalidSeries(format!(
                "dates not strictly increasing: {} then {}",
                w[0].date, w[1].date
            )));
        }
        let floor = mode.baseline() - 1.0;
        if let Some(p) = points
            .iter()
            .find(|p| !(p.value.is_finite() && p.value > floor))
        {
            return Err(ReturnsError::InvalidSeries(format!(
                "return {} on {} out of range",
                p.value, p.date
            )));
        }
        Ok(ReturnSeries {
            ticker,
            mode,
            points,
        })
    }

    pub fn ticker(&self) -> &Ticker {
        &self.ticker
    }

    pub fn mode(&self) -> ReturnMode {
        self.mode
    }

    pub fn points(&self) -> &[ReturnPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.points.iter().map(|p| p.date).collect()
    }

    /// Index of `date`, if present.
    pub fn position(&self, date: NaiveDate) -> Option<usize> {
        self.points.binary_search_by_key(&date, |p| p.date).ok()
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.points.last().map(|p| p.date)
    }

    /// Points dated on or before `date`.
    pub fn truncated(&self, date: NaiveDate) -> ReturnSeries {
        let end = self.points.partition_point(|p| p.date <= date);
        ReturnSeries {
            ticker: self.ticker.clone(),
            mode: self.mode,
            points: self.points[..end].to_vec(),
        }
    }
}

pub fn daily_returns(series: &PriceSeries, mode: ReturnMode) -> Result<ReturnSeries, ReturnsError> {
    daily_returns_from(series, mode, PriceField::Close)
}

pub fn daily_returns_from(
    series: &PriceSeries,
    mode: ReturnMode,
    field: PriceField,
) -> Result<ReturnSeries, ReturnsError> {
    let bars = series.bars();
    if bars.len() < 2 {
        return Err(ReturnsError::InsufficientData {
            required: 2,
            actual: bars.len(),
        });
    }
    let points = bars
        .windows(2)
        .map(|w| {
            let ratio = w[1].price(field) / w[0].price(field);
            let value = match mode {
                ReturnMode::Ratio => ratio,
                ReturnMode::Simple => ratio - 1.0,
            };
            ReturnPoint {
                date: w[1].date,
                value,
            }
        })
        .collect();
    Ok(ReturnSeries {
        ticker: series.ticker().clone(),
        mode,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calendar::weekdays_from;
    use crate::market_data::OhlcBar;

    fn series_from_closes(closes: &[f64]) -> PriceSeries {
        let dates = weekdays_from("2012-01-03".parse().unwrap(), closes.len());
        let bars = dates
            .into_iter()
            .zip(closes)
            .map(|(date, &c)| OhlcBar {
                date,
                open: c,
                high: c,
                low: c,
                close: c,
                adj_close: c,
                volume: 0,
            })
            .collect();
        PriceSeries::new(Ticker::new("TEST").unwrap(), bars).unwrap()
    }

    #[test]
    fn both_modes() {
        let s = series_from_closes(&[100.0, 105.0]);
        let simple = daily_returns(&s, ReturnMode::Simple).unwrap();
        let ratio = daily_returns(&s, ReturnMode::Ratio).unwrap();
        assert!((simple.values()[0] - 0.05).abs() < 1e-15);
        assert_eq!(ratio.values(), vec![1.05]);
        assert_eq!(simple.points()[0].date, s.bars()[1].date);
    }

    #[test]
    fn flat_prices_give_zero() {
        let s = series_from_closes(&[50.0, 50.0, 50.0]);
        assert_eq!(
            daily_returns(&s, ReturnMode::Simple).unwrap().values(),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn needs_two_bars() {
        let s = series_from_closes(&[50.0]);
        assert_eq!(
            daily_returns(&s, ReturnMode::Simple),
            Err(ReturnsError::InsufficientData {
                required: 2,
                actual: 1
            })
        );
    }

    #[test]
    fn adjusted_close_selectable() {
        let mut s = series_from_closes(&[10.0, 11.0]);
        let mut bars = s.bars().to_vec();
        bars[1].adj_close = 10.5;
        s = PriceSeries::new(s.ticker().clone(), bars).unwrap();
        let r = daily_returns_from(&s, ReturnMode::Simple, PriceField::AdjClose).unwrap();
        assert!((r.values()[0] - 0.05).abs() < 1e-15);
    }

    #[test]
    fn truncation_and_lookup() {
        let s = series_from_closes(&[1.0, 2.0, 3.0, 4.0]);
        let r = daily_returns(&s, ReturnMode::Simple).unwrap();
        let d = r.points()[1].date;
        assert_eq!(r.position(d), Some(1));
        assert_eq!(r.truncated(d).len(), 2);
    }

    #[test]
    fn constructor_validates() {
        let t = Ticker::new("X").unwrap();
        let d: NaiveDate = "2012-01-03".parse().unwrap();
        let p = |v| ReturnPoint { date: d, value: v };
        assert!(ReturnSeries::new(t.clone(), ReturnMode::Simple, vec![p(0.1), p(0.2)]).is_err());
        assert!(ReturnSeries::new(t.clone(), ReturnMode::Simple, vec![p(-1.0)]).is_err());
        assert!(ReturnSeries::new(t, ReturnMode::Ratio, vec![p(0.0)]).is_err());
    }
}
