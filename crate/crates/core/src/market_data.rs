//! OHLC ingestion: the seven-column CSV layout, a pluggable remote fetch, and
//! the writer that reproduces the same bytes the parser accepts.

use std::fmt;
use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;

use chrono::{NaiveDate, NaiveTime};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CSV_HEADER: &str = "Date,Open,High,Low,Close,Adj Close,Volume";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("malformed header: expected `{CSV_HEADER}`, found `{found}`")]
    MalformedHeader { found: String },
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("duplicate date {date} at line {line}")]
    DuplicateDate { date: NaiveDate, line: usize },
    #[error("input has no data rows")]
    EmptyInput,
    #[error("invalid ticker `{0}`")]
    InvalidTicker(String),
    #[error("invalid series: {0}")]
    InvalidSeries(String),
    #[error(
        "endpoint template `{0}` must contain {{ticker}}, a from placeholder and a to placeholder"
    )]
    InvalidEndpoint(String),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<io::Error> for DataError {
    fn from(err: io::Error) -> Self {
        DataError::Io(err.to_string())
    }
}

/// Ticker symbol: 1 to 10 characters from `A-Z`, `0-9`, `.`, `-`, `^`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Ticker(String);

impl Ticker {
    pub fn new(symbol: impl Into<String>) -> Result<Self, DataError> {
        let symbol = symbol.into();
        let valid_char =
            |c: char| c.is_ascii_uppercase() || c.is_ascii_digit() || matches!(c, '.' | '-' | '^');
        if symbol.is_empty() || symbol.len() > 10 || !symbol.chars().all(valid_char) {
            return Err(DataError::InvalidTicker(symbol));
        }
        Ok(Ticker(symbol))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Ticker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&self.0)
    }
}

impl FromStr for Ticker {
    type Err = DataError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ticker::new(s)
    }
}

impl TryFrom<String> for Ticker {
    type Error = DataError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Ticker::new(s)
    }
}

impl From<Ticker> for String {
    fn from(t: Ticker) -> Self {
        t.0
    }
}

/// One trading day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OhlcBar {
    pub date: NaiveDate,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
    pub adj_close: f64,
    pub volume: u64,
}

impl OhlcBar {
    /// Checks positivity and the high/low envelope. Returns a reason string
    /// on failure so callers can wrap it with their own context.
    pub fn validate(&self) -> Result<(), String> {
        let prices = [
            ("Open", self.open),
            ("High", self.high),
            ("Low", self.low),
            ("Close", self.close),
            ("Adj Close", self.adj_close),
        ];
        for (name, value) in prices {
            if !(value.is_finite() && value > 0.0) {
                return Err(format!(
                    "{name} must be a positive finite price, got {value}"
                ));
            }
        }
        if self.low > self.high {
            return Err(format!("Low {} above High {}", self.low, self.high));
        }
        if self.low > self.open.min(self.close) {
            return Err(format!("Low {} above min(Open, Close)", self.low));
        }
        if self.high < self.open.max(self.close) {
            return Err(format!("High {} below max(Open, Close)", self.high));
        }
        Ok(())
    }

    pub fn price(&self, field: PriceField) -> f64 {
        match field {
            PriceField::Close => self.close,
            PriceField::AdjClose => self.adj_close,
        }
    }
}

/// Which column feeds the return computation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriceField {
    #[default]
    Close,
    AdjClose,
}

/// Bars for one ticker, strictly increasing by date. Weekend and holiday
/// gaps are fine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    ticker: Ticker,
    bars: Vec<OhlcBar>,
}

impl PriceSeries {
    pub fn new(ticker: Ticker, bars: Vec<OhlcBar>) -> Result<Self, DataError> {
        for (i, bar) in bars.iter().enumerate() {
            bar.validate().map_err(|reason| {
                DataError::InvalidSeries(format!("bar {} ({}): {reason}", i, bar.date))
            })?;
        }
        if let Some(pair) = bars.windows(2).find(|w| w[0].date >= w[1].date) {
            return Err(DataError::InvalidSeries(format!(
                "dates not strictly increasing: {} then {}",
                pair[0].date, pair[1].date
            )));
        }
        Ok(PriceSeries { ticker, bars })
    }

    pub fn ticker(&self) -> &Ticker {
        &self.ticker
    }

    pub fn bars(&self) -> &[OhlcBar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.bars.last().map(|b| b.date)
    }

    /// Bars with `from <= date <= to`.
    pub fn filter_range(&self, from: NaiveDate, to: NaiveDate) -> PriceSeries {
        PriceSeries {
            ticker: self.ticker.clone(),
            bars: self
                .bars
                .iter()
                .filter(|b| b.date >= from && b.date <= to)
                .copied()
                .collect(),
        }
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(64 * (self.bars.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for bar in &self.bars {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                bar.date.format("%Y-%m-%d"),
                format_price(bar.open),
                format_price(bar.high),
                format_price(bar.low),
                format_price(bar.close),
                format_price(bar.adj_close),
                bar.volume
            ));
        }
        out
    }
}

/// Shortest decimal that parses back to the same `f64`, always with a
/// fractional part.
fn format_price(x: f64) -> String {
    let s = x.to_string();
    if s.contains('.') {
        s
    } else {
        s + ".0"
    }
}

fn parse_decimal(field: &str) -> Option<f64> {
    let (int, frac) = match field.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (field, None),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !digits(int) || !frac.is_none_or(digits) {
        return None;
    }
    field.parse().ok()
}

/// Parses the seven-column CSV layout. Rows may arrive in any order; the
/// result is sorted by date. Blank lines are ignored. Line numbers in errors
/// are 1-based and count the header.
pub fn parse_csv(ticker: Ticker, raw: &str) -> Result<PriceSeries, DataError> {
    let mut lines = raw
        .split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)));

    let header = loop {
        match lines.next() {
            Some((_, l)) if l.trim().is_empty() => continue,
            Some((_, l)) => break l,
            None => return Err(DataError::EmptyInput),
        }
    };
    if header != CSV_HEADER {
        return Err(DataError::MalformedHeader {
            found: header.to_string(),
        });
    }

    let mut rows: Vec<(usize, OhlcBar)> = Vec::new();
    for (line, text) in lines {
        if text.trim().is_empty() {
            continue;
        }
        rows.push((line, parse_row(line, text)?));
    }
    rows.sort_by_key(|(_, bar)| bar.date);
    if let Some(pair) = rows.windows(2).find(|w| w[0].1.date == w[1].1.date) {
        let line = pair[0].0.max(pair[1].0);
        return Err(DataError::DuplicateDate {
            date: pair[1].1.date,
            line,
        });
    }

    Ok(PriceSeries {
        ticker,
        bars: rows.into_iter().map(|(_, bar)| bar).collect(),
    })
}

fn parse_row(line: usize, text: &str) -> Result<OhlcBar, DataError> {
    let bad = |reason: String| DataError::MalformedRow { line, reason };
    let fields: Vec<&str> = text.split(',').collect();
    if fields.len() != 7 {
        return Err(bad(format!("expected 7 fields, found {}", fields.len())));
    }
    let date = NaiveDate::parse_from_str(fields[0], "%Y-%m-%d")
        .ok()
        .filter(|d| d.format("%Y-%m-%d").to_string() == fields[0])
        .ok_or_else(|| bad(format!("bad date `{}`", fields[0])))?;
    let price = |idx: usize, name: &str| {
        parse_decimal(fields[idx])
            .ok_or_else(|| bad(format!("{name} `{}` is not a decimal", fields[idx])))
    };
    let bar = OhlcBar {
        date,
        open: price(1, "Open")?,
        high: price(2, "High")?,
        low: price(3, "Low")?,
        close: price(4, "Close")?,
        adj_close: price(5, "Adj Close")?,
        volume: fields[6].parse().map_err(|_| {
            bad(format!(
                "Volume `{}` is not a non-negative integer",
                fields[6]
            ))
        })?,
    };
    bar.validate().map_err(bad)?;
    Ok(bar)
}

/// Writes `series` in the format [`parse_csv`] reads. Parsing the file back
/// reproduces every field exactly.
pub fn save_series(series: &PriceSeries, path: &Path) -> Result<(), DataError> {
    fs::write(path, series.to_csv_string())?;
    Ok(())
}

pub fn load_series(ticker: Ticker, path: &Path) -> Result<PriceSeries, DataError> {
    let raw = fs::read_to_string(path)?;
    parse_csv(ticker, &raw)
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("transport error{}: {message}", .status.map(|s| format!(" (status {s})")).unwrap_or_default())]
pub struct TransportError {
    pub status: Option<u16>,
    pub message: String,
}

/// Blocking HTTP GET. Tests substitute a canned implementation.
pub trait Transport {
    fn get(&self, url: &str) -> Result<String, TransportError>;
}

/// Expands an endpoint template. Recognised placeholders: `{ticker}`,
/// `{from}` / `{to}` (ISO dates) and `{from_epoch}` / `{to_epoch}` (Unix
/// seconds at midnight UTC; `to_epoch` is the end of the `to` day).
pub fn expand_endpoint(
    template: &str,
    ticker: &Ticker,
    from: NaiveDate,
    to: NaiveDate,
) -> Result<String, DataError> {
    let has = |p: &str| template.contains(p);
    if !has("{ticker}")
        || !(has("{from}") || has("{from_epoch}"))
        || !(has("{to}") || has("{to_epoch}"))
    {
        return Err(DataError::InvalidEndpoint(template.to_string()));
    }
    let epoch = |d: NaiveDate| d.and_time(NaiveTime::MIN).and_utc().timestamp();
    Ok(template
        .replace("{ticker}", ticker.as_str())
        .replace("{from_epoch}", &epoch(from).to_string())
        .replace("{to_epoch}", &(epoch(to) + 86_400).to_string())
        .replace("{from}", &from.format("%Y-%m-%d").to_string())
        .replace("{to}", &to.format("%Y-%m-%d").to_string()))
}

/// Downloads CSV text through `transport` and keeps the bars in `[from, to]`.
pub fn fetch_remote(
    transport: &dyn Transport,
    ticker: &Ticker,
    from: NaiveDate,
    to: NaiveDate,
    endpoint: &str,
) -> Result<PriceSeries, DataError> {
    let url = expand_endpoint(endpoint, ticker, from, to)?;
    let body = transport.get(&url)?;
    Ok(parse_csv(ticker.clone(), &body)?.filter_range(from, to))
}
