//! Sample statistics with `n - 1` denominators throughout. Sums are
//! Neumaier-compensated so results do not depend on evaluation order at the
//! 1e-12 level.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::returns::ReturnSeries;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("insufficient data: need at least {required} values, have {actual}")]
    InsufficientData { required: usize, actual: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("zero variance: sample is constant")]
    ZeroVariance,
    #[error("no overlapping dates between the two series")]
    NoOverlap,
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().collect::<CompensatedSum>().value()
}

pub fn mean(xs: &[f64]) -> f64 {
    sum(xs.iter().copied()) / xs.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub std_dev: f64,
}

fn require(n: usize, required: usize) -> Result<(), StatsError> {
    if n < required {
        Err(StatsError::InsufficientData {
            required,
            actual: n,
        })
    } else {
        Ok(())
    }
}

pub fn sample_stats(xs: &[f64]) -> Result<SampleStats, StatsError> {
    require(xs.len(), 2)?;
    let m = mean(xs);
    let variance = sum(xs.iter().map(|x| (x - m) * (x - m))) / (xs.len() - 1) as f64;
    Ok(SampleStats {
        n: xs.len(),
        mean: m,
        variance,
        std_dev: variance.sqrt(),
    })
}

/// Sample standard deviation; shorthand for `sample_stats(xs)?.std_dev`.
pub fn std_dev(xs: &[f64]) -> Result<f64, StatsError> {
    sample_stats(xs).map(|s| s.std_dev)
}

fn check_pair(xs: &[f64], ys: &[f64]) -> Result<(), StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    require(xs.len(), 2)
}

pub fn covariance(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    check_pair(xs, ys)?;
    let (mx, my) = (mean(xs), mean(ys));
    Ok(sum(xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my))) / (xs.len() - 1) as f64)
}

/// Pearson correlation. Floating-point overshoot past ±1 of at most 1e-12 is
/// clamped away.
pub fn correlation(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    check_pair(xs, ys)?;
    let sx = std_dev(xs)?;
    let sy = std_dev(ys)?;
    if sx == 0.0 || sy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let r = covariance(xs, ys)? / (sx * sy);
    if r.abs() > 1.0 && r.abs() - 1.0 <= 1e-12 {
        Ok(r.signum())
    } else {
        Ok(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardScore {
    pub value: f64,
    pub x: f64,
    pub mean: f64,
    pub sigma: f64,
    pub n: usize,
}

/// `(x - mean) / (sigma / sqrt(n))`, scoring `x` against the sample `xs`.
pub fn standard_score(x: f64, xs: &[f64]) -> Result<StandardScore, StatsError> {
    let s = sample_stats(xs)?;
    if s.std_dev == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let value = (x - s.mean) / (s.std_dev / (s.n as f64).sqrt());
    Ok(StandardScore {
        value,
        x,
        mean: s.mean,
        sigma: s.std_dev,
        n: s.n,
    })
}

/// Two return series inner-joined on date.
#[derive(Debug, Clone, PartialEq)]
pub struct Aligned {
    pub dates: Vec<NaiveDate>,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

pub fn align_by_date(a: &ReturnSeries, b: &ReturnSeries) -> Result<Aligned, StatsError> {
    let (pa, pb) = (a.points(), b.points());
    let mut out = Aligned {
        dates: Vec::new(),
        left: Vec::new(),
        right: Vec::new(),
    };
    let (mut i, mut j) = (0, 0);
    while i < pa.len() && j < pb.len() {
        match pa[i].date.cmp(&pb[j].date) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.dates.push(pa[i].date);
                out.left.push(pa[i].value);
                out.right.push(pb[j].value);
                i += 1;
                j += 1;
            }
        }
    }
    if out.dates.is_empty() {
        return Err(StatsError::NoOverlap);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market_data::Ticker;
    use crate::returns::{ReturnMode, ReturnPoint};

    #[test]
    fn compensation_recovers_cancelled_terms() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(sum(xs), 2.0);
    }

    #[test]
    fn stats_small_vectors() {
        let s = sample_stats(&[4.2, 4.2, 4.2]).unwrap();
        assert_eq!((s.variance, s.std_dev), (0.0, 0.0));
        let s = sample_stats(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((s.mean, s.variance, s.std_dev), (2.0, 1.0, 1.0));
        let s = sample_stats(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).unwrap();
        assert_eq!(s.mean, 5.0);
        assert!((s.variance - 32.0 / 7.0).abs() < 1e-12);
        assert_eq!(
            sample_stats(&[1.0]),
            Err(StatsError::InsufficientData {
                required: 2,
                actual: 1
            })
        );
    }

    #[test]
    fn covariance_cases() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(covariance(&x, &x).unwrap(), 1.0);
        assert_eq!(covariance(&x, &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert_eq!(covariance(&x, &[5.0, 5.0, 5.0]).unwrap(), 0.0);
        assert_eq!(
            covariance(&x, &[1.0]),
            Err(StatsError::LengthMismatch { left: 3, right: 1 })
        );
    }

    #[test]
    fn correlation_cases() {
        let x = [0.3, -1.2, 2.5, 0.7];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((correlation(&x, &x).unwrap() - 1.0).abs() <= 1e-12);
        assert!((correlation(&x, &neg).unwrap() + 1.0).abs() <= 1e-12);
        assert_eq!(correlation(&x, &[1.0; 4]), Err(StatsError::ZeroVariance));
    }

    #[test]
    fn standard_score_cases() {
        let xs = [1.0, 2.0, 3.0];
        assert_eq!(standard_score(2.0, &xs).unwrap().value, 0.0);
        assert!((standard_score(3.0, &xs).unwrap().value - 3f64.sqrt()).abs() < 1e-12);
        assert!((standard_score(1.0, &xs).unwrap().value + 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(
            standard_score(1.0, &[2.0, 2.0]),
            Err(StatsError::ZeroVariance)
        );
    }

    fn series(dates: &[&str]) -> ReturnSeries {
        let points = dates
            .iter()
            .enumerate()
            .map(|(i, d)| ReturnPoint {
                date: d.parse().unwrap(),
                value: i as f64 / 100.0,
            })
            .collect();
        ReturnSeries::new(Ticker::new("T").unwrap(), ReturnMode::Simple, points).unwrap()
    }

    #[test]
    fn alignment() {
        let a = series(&["2012-01-03", "2012-01-04", "2012-01-05"]);
        assert_eq!(align_by_date(&a, &a).unwrap().dates.len(), 3);

        let b = series(&["2012-01-04", "2012-01-05", "2012-01-06"]);
        let j = align_by_date(&a, &b).unwrap();
        assert_eq!(
            j.dates,
            vec![
                "2012-01-04".parse().unwrap(),
                "2012-01-05".parse::<NaiveDate>().unwrap()
            ]
        );
        assert_eq!(j.left, vec![0.01, 0.02]);
        assert_eq!(j.right, vec![0.0, 0.01]);

        let c = series(&["2013-01-04"]);
        assert_eq!(align_by_date(&a, &c), Err(StatsError::NoOverlap));
    }
}
