//! Shapiro-Wilk normality test plus the QQ and density point sets used to
//! eyeball a return distribution.
//!
//! The expected normal order statistics and their covariance matrix have no
//! closed form, so the coefficients and the p-value follow Royston's
//! polynomial approximations (Applied Statistics algorithm AS R94), valid for
//! `3 <= n <= 5000`:
//!
//! * `m_i = Φ⁻¹((i - 3/8) / (n + 1/4))` for the lower half of the sample;
//! * the two most extreme coefficients are corrected by polynomials in
//!   `1/√n`, the rest are `m_i` rescaled so that `Σ a_i² = 1`;
//! * `n = 3` uses the exact coefficient `√½` and the exact null distribution;
//! * for `4 <= n <= 11`, `-ln(γ - ln(1 - W))` is normal with mean and log-sd
//!   polynomial in `n`; for `n >= 12`, `ln(1 - W)` is normal with mean and
//!   log-sd polynomial in `ln n`.

use serde::{Deserialize, Serialize};
use statrs::function::erf;
use thiserror::Error;

use crate::stats::{mean, CompensatedSum};

pub const MIN_N: usize = 3;
pub const MAX_N: usize = 5000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormalityError {
    #[error("sample too small: n = {0}, need at least {MIN_N}")]
    SampleTooSmall(usize),
    #[error("sample too large: n = {0}, at most {MAX_N} supported")]
    SampleTooLarge(usize),
    #[error("degenerate sample: all values are equal")]
    DegenerateSample,
    #[error("sample contains a non-finite value")]
    NonFinite,
    #[error("significance level {0} outside (0, 1)")]
    InvalidAlpha(f64),
    #[error("insufficient data: need at least {required} values, have {actual}")]
    InsufficientData { required: usize, actual: usize },
}

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal upper tail, `1 - Φ(x)`, without cancellation.
pub fn norm_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Standard normal quantile for `p` in `(0, 1)`.
pub fn norm_quantile(p: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erf::erfc_inv(2.0 * p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub n: usize,
    pub w: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub reject_normality: bool,
    /// `a_1..a_n`, matched to the ascending-sorted sample.
    pub coefficients: Vec<f64>,
}

impl NormalityReport {
    pub fn summary(&self) -> NormalitySummary {
        NormalitySummary {
            n: self.n,
            w: self.w,
            p_value: self.p_value,
            alpha: self.alpha,
            reject_normality: self.reject_normality,
        }
    }
}

/// A [`NormalityReport`] without the coefficient vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalitySummary {
    pub n: usize,
    pub w: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub reject_normality: bool,
}

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Shapiro-Wilk coefficients for a sample of size `n`, ordered to pair with
/// the ascending-sorted sample. Antisymmetric with unit sum of squares.
pub fn swilk_coefficients(n: usize) -> Result<Vec<f64>, NormalityError> {
    if n < MIN_N {
        return Err(NormalityError::SampleTooSmall(n));
    }
    if n > MAX_N {
        return Err(NormalityError::SampleTooLarge(n));
    }
    let half = n / 2;
    // Upper half, largest first: upper[0] pairs with the maximum.
    let mut upper = vec![0.0; half];
    if n == 3 {
        upper[0] = std::f64::consts::FRAC_1_SQRT_2;
    } else {
        const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
        const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
        let an = n as f64;
        let m: Vec<f64> = (1..=half)
            .map(|i| -norm_quantile((i as f64 - 0.375) / (an + 0.25)))
            .collect();
        let summ2 = 2.0 * m.iter().map(|v| v * v).collect::<CompensatedSum>().value();
        let ssumm2 = summ2.sqrt();
        let rsn = 1.0 / an.sqrt();
        let a1 = poly(&C1, rsn) + m[0] / ssumm2;
        let (first_plain, fac) = if n > 5 {
            let a2 = m[1] / ssumm2 + poly(&C2, rsn);
            let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
                / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
                .sqrt();
            upper[1] = a2;
            (2, fac)
        } else {
            let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
            (1, fac)
        };
        upper[0] = a1;
        for i in first_plain..half {
            upper[i] = m[i] / fac;
        }
    }
    let mut a = vec![0.0; n];
    for (i, &u) in upper.iter().enumerate() {
        a[n - 1 - i] = u;
        a[i] = -u;
    }
    Ok(a)
}

/// Upper-tail p-value of `w` under normality.
pub fn swilk_p_value(w: f64, n: usize) -> f64 {
    if w >= 1.0 {
        return 1.0;
    }
    if n == 3 {
        // Exact: P(W <= w) = (6/π)(asin √w - asin √¾).
        let p = 6.0 / std::f64::consts::PI * (w.sqrt().asin() - (0.75f64).sqrt().asin());
        return p.clamp(0.0, 1.0);
    }
    let an = n as f64;
    let y = (1.0 - w).ln();
    let (z, mean, sd) = if n <= 11 {
        const G: [f64; 2] = [-2.273, 0.459];
        const C3: [f64; 4] = [0.544, -0.39978, 0.025054, -6.714e-4];
        const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
        let gamma = poly(&G, an);
        if y >= gamma {
            // Beyond the support of the transformation: W is implausibly small.
            return 0.0;
        }
        (-(gamma - y).ln(), poly(&C3, an), poly(&C4, an).exp())
    } else {
        const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
        const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
        let ln_n = an.ln();
        (y, poly(&C5, ln_n), poly(&C6, ln_n).exp())
    };
    norm_sf((z - mean) / sd)
}

fn sorted_finite(xs: &[f64]) -> Result<Vec<f64>, NormalityError> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(NormalityError::NonFinite);
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted)
}

/// W statistic and p-value for `xs`; `reject_normality` is `p_value < alpha`.
pub fn shapiro_wilk(xs: &[f64], alpha: f64) -> Result<NormalityReport, NormalityError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(NormalityError::InvalidAlpha(alpha));
    }
    let n = xs.len();
    let coefficients = swilk_coefficients(n)?;
    let sorted = sorted_finite(xs)?;
    let range = sorted[n - 1] - sorted[0];
    if range == 0.0 {
        return Err(NormalityError::DegenerateSample);
    }
    // Centre and scale first so W does not depend on location or units.
    let m = mean(&sorted);
    let scaled: Vec<f64> = sorted.iter().map(|x| (x - m) / range).collect();
    let numerator = coefficients
        .iter()
        .zip(&scaled)
        .map(|(a, x)| a * x)
        .collect::<CompensatedSum>()
        .value();
    let denominator = scaled
        .iter()
        .map(|x| x * x)
        .collect::<CompensatedSum>()
        .value();
    if denominator == 0.0 {
        return Err(NormalityError::DegenerateSample);
    }
    let w = (numerator * numerator / denominator).min(1.0);
    let p_value = swilk_p_value(w, n);
    Ok(NormalityReport {
        n,
        w,
        p_value,
        alpha,
        reject_normality: p_value < alpha,
        coefficients,
    })
}

/// Sturges-style histogram bin breaks rounded to "nice" numbers, the way
/// common statistics packages choose them by default.
pub fn histogram_breaks(xs: &[f64]) -> Result<Vec<f64>, NormalityError> {
    if xs.len() < 2 {
        return Err(NormalityError::InsufficientData {
            required: 2,
            actual: xs.len(),
        });
    }
    let sorted = sorted_finite(xs)?;
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    Ok(pretty(lo, hi, sturges_bins(xs.len())))
}

fn pretty(lo: f64, hi: f64, ndiv: usize) -> Vec<f64> {
    const H: f64 = 1.5;
    const H5: f64 = 0.5 + 1.5 * H;
    let dx = hi - lo;
    let cell = if dx == 0.0 {
        lo.abs().max(1.0)
    } else {
        dx / ndiv as f64
    };
    let base = 10f64.powf(cell.log10().floor());
    let mut unit = base;
    if 2.0 * base - cell < H * (cell - unit) {
        unit = 2.0 * base;
        if 5.0 * base - cell < H5 * (cell - unit) {
            unit = 5.0 * base;
            if 10.0 * base - cell < H * (cell - unit) {
                unit = 10.0 * base;
            }
        }
    }
    let start = (lo / unit + 1e-7).floor() as i64;
    let end = (hi / unit - 1e-7).ceil() as i64;
    let end = end.max(start + 1);
    (start..=end).map(|i| i as f64 * unit).collect()
}

fn sturges_bins(n: usize) -> usize {
    ((n as f64).log2().ceil() as usize + 1).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinRule {
    /// `ceil(log2 n) + 1` equal-width bins.
    #[default]
    Sturges,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub center: f64,
    pub width: f64,
    pub count: usize,
    pub density: f64,
}

/// Width of the single bin used for a constant sample, relative to the
/// magnitude of the value.
const SPIKE_RELATIVE_WIDTH: f64 = 1e-6;

/// Equal-width histogram over `[min, max]` normalised to unit area. The
/// maximum falls into the last bin.
pub fn density_histogram(xs: &[f64], rule: BinRule) -> Result<Vec<HistogramBin>, NormalityError> {
    let n = xs.len();
    if n < 2 {
        return Err(NormalityError::InsufficientData {
            required: 2,
            actual: n,
        });
    }
    let sorted = sorted_finite(xs)?;
    let (lo, hi) = (sorted[0], sorted[n - 1]);
    if lo == hi {
        let width = lo.abs().max(1.0) * SPIKE_RELATIVE_WIDTH;
        return Ok(vec![HistogramBin {
            center: lo,
            width,
            count: n,
            density: 1.0 / width,
        }]);
    }
    let bins = match rule {
        BinRule::Sturges => sturges_bins(n),
        BinRule::Fixed(k) => k.max(1),
    };
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for x in &sorted {
        let idx = (((x - lo) / width).floor() as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin {
            center: lo + (i as f64 + 0.5) * width,
            width,
            count,
            density: count as f64 / (n as f64 * width),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QqPoint {
    pub theoretical: f64,
    pub sample: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceLine {
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QqPlotData {
    pub points: Vec<QqPoint>,
    pub reference_line: ReferenceLine,
}

/// Blom plotting position for the `i`-th (1-based) of `n` order statistics.
pub fn blom_position(i: usize, n: usize) -> f64 {
    (i as f64 - 0.375) / (n as f64 + 0.25)
}

/// Linear-interpolation sample quantile (the "type 7" definition) of an
/// already sorted slice.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Normal QQ points with Blom positions. The reference line passes through
/// `(0, median)` with slope `IQR / (Φ⁻¹(¾) - Φ⁻¹(¼))`.
pub fn qq_plot_data(xs: &[f64]) -> Result<QqPlotData, NormalityError> {
    let n = xs.len();
    if n < 3 {
        return Err(NormalityError::InsufficientData {
            required: 3,
            actual: n,
        });
    }
    let sorted = sorted_finite(xs)?;
    let points = sorted
        .iter()
        .enumerate()
        .map(|(i, &sample)| QqPoint {
            theoretical: norm_quantile(blom_position(i + 1, n)),
            sample,
        })
        .collect();
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let normal_iqr = norm_quantile(0.75) - norm_quantile(0.25);
    Ok(QqPlotData {
        points,
        reference_line: ReferenceLine {
            slope: iqr / normal_iqr,
            intercept: quantile_sorted(&sorted, 0.5),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n3_is_exact() {
        let r = shapiro_wilk(&[1.0, 2.0, 3.0], 0.05).unwrap();
        assert!((r.w - 1.0).abs() < 1e-9);
        assert_eq!(r.p_value, 1.0);
        assert!(!r.reject_normality);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(r.coefficients, vec![-h, 0.0, h]);
    }

    #[test]
    fn degenerate_and_size_errors() {
        assert_eq!(
            shapiro_wilk(&[5.0, 5.0, 5.0], 0.05),
            Err(NormalityError::DegenerateSample)
        );
        assert_eq!(
            shapiro_wilk(&[1.0, 2.0], 0.05),
            Err(NormalityError::SampleTooSmall(2))
        );
        let big: Vec<f64> = (0..5001).map(f64::from).collect();
        assert_eq!(
            shapiro_wilk(&big, 0.05),
            Err(NormalityError::SampleTooLarge(5001))
        );
        assert_eq!(
            shapiro_wilk(&[1.0, 2.0, f64::NAN], 0.05),
            Err(NormalityError::NonFinite)
        );
        assert_eq!(
            shapiro_wilk(&[1.0, 2.0, 3.0], 1.0),
            Err(NormalityError::InvalidAlpha(1.0))
        );
    }

    #[test]
    fn ties_allowed() {
        let r = shapiro_wilk(&[1.0, 1.0, 2.0, 2.0, 3.0, 3.0], 0.05).unwrap();
        assert!(r.w > 0.0 && r.w <= 1.0);
    }

    #[test]
    fn coefficients_antisymmetric_unit_norm() {
        for n in [3, 4, 5, 6, 7, 11, 12, 50, 251, 1000, 5000] {
            let a = swilk_coefficients(n).unwrap();
            for i in 0..n {
                assert!((a[i] + a[n - 1 - i]).abs() < 1e-15, "n={n}");
            }
            let ss: f64 = a.iter().map(|v| v * v).sum();
            assert!((ss - 1.0).abs() < 1e-6, "n={n} ss={ss}");
            assert!(a.windows(2).all(|w| w[0] <= w[1]), "n={n} not monotone");
        }
    }

    #[test]
    fn small_n_p_value_branches() {
        // Evenly spaced samples look more uniform than normal but are not
        // extreme; tiny n must stay in (0, 1].
        for n in 4..=11 {
            let xs: Vec<f64> = (0..n).map(f64::from).collect();
            let r = shapiro_wilk(&xs, 0.05).unwrap();
            assert!(r.p_value > 0.0 && r.p_value <= 1.0, "n={n} p={}", r.p_value);
        }
        // One huge outlier in a small sample.
        let r = shapiro_wilk(&[0.0, 0.01, 0.02, 0.03, 100.0], 0.05).unwrap();
        assert!(r.reject_normality);
    }

    #[test]
    fn distribution_functions() {
        assert!((norm_cdf(1.959963984540054) - 0.975).abs() < 1e-14);
        assert!((norm_quantile(0.975) - 1.959963984540054).abs() < 1e-13);
        assert_eq!(norm_quantile(0.5), 0.0);
        assert!((norm_sf(8.0) - 6.22096057427174e-16).abs() < 1e-27);
    }

    #[test]
    fn histogram_two_values() {
        let bins = density_histogram(&[0.0, 1.0], BinRule::Fixed(2)).unwrap();
        assert_eq!(bins.len(), 2);
        for b in &bins {
            assert_eq!(b.width, 0.5);
            assert_eq!(b.density, 1.0);
        }
        // Sturges picks two bins for n = 2 as well.
        assert_eq!(
            density_histogram(&[0.0, 1.0], BinRule::Sturges).unwrap(),
            bins
        );
    }

    #[test]
    fn histogram_constant_spike() {
        let bins = density_histogram(&[3.0; 10], BinRule::Sturges).unwrap();
        assert_eq!(bins.len(), 1);
        assert!((bins[0].density * bins[0].width - 1.0).abs() < 1e-12);
        assert!(density_histogram(&[1.0], BinRule::Sturges).is_err());
    }

    #[test]
    fn qq_positions() {
        let qq = qq_plot_data(&[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(
            qq.points[1],
            QqPoint {
                theoretical: 0.0,
                sample: 0.0
            }
        );
        assert_eq!(qq.reference_line.intercept, 0.0);

        let probs: Vec<f64> = (1..=5).map(|i| blom_position(i, 5)).collect();
        let want = [
            0.119047619047619,
            0.30952380952380953,
            0.5,
            0.6904761904761905,
            0.8809523809523809,
        ];
        for (p, w) in probs.iter().zip(want) {
            assert!((p - w).abs() < 1e-15);
        }
        let fixed: Vec<f64> = probs.iter().map(|&p| norm_quantile(p)).collect();
        let qq = qq_plot_data(&fixed).unwrap();
        for pt in &qq.points {
            assert!((pt.theoretical - pt.sample).abs() < 1e-15);
        }
        assert!(qq
            .points
            .windows(2)
            .all(|w| w[0].theoretical < w[1].theoretical));
    }

    #[test]
    fn pretty_breaks_are_round() {
        let b = pretty(-0.0731, 0.0589, 9);
        assert_eq!(b.first().copied(), Some(-0.08));
        assert!((b.last().unwrap() - 0.06).abs() < 1e-12);
        let steps: Vec<f64> = b.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(steps.iter().all(|s| (s - 0.02).abs() < 1e-12), "{b:?}");
    }
}
