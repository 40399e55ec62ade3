//! Plain-CSV exports for external plotting.

use std::fmt::Write as _;

use crate::normality::{HistogramBin, QqPlotData};
use crate::returns::ReturnSeries;
use crate::signal::SigmaPoint;

/// Formats `x` like C's `%.{digits}g`.
pub fn format_sig(x: f64, digits: usize) -> String {
    assert!(digits > 0);
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp >= -4 && exp < digits as i32 {
        let fixed = format!("{:.*}", (digits as i32 - 1 - exp) as usize, x);
        trim_fraction(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_fraction(mantissa), sign, exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `Date,Return` with ten significant digits.
pub fn returns_csv(series: &ReturnSeries) -> String {
    let mut out = String::from("Date,Return\n");
    for p in series.points() {
        let _ = writeln!(
            out,
            "{},{}",
            p.date.format("%Y-%m-%d"),
            format_sig(p.value, 10)
        );
    }
    out
}

/// `Date,Sigma,UpperBand,LowerBand`. Bands are centred on the mode's flat
/// value, so ratio-mode bands straddle 1.
pub fn bands_csv(sigmas: &[SigmaPoint], k: f64, baseline: f64) -> String {
    let mut out = String::from("Date,Sigma,UpperBand,LowerBand\n");
    for s in sigmas {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            s.date.format("%Y-%m-%d"),
            format_sig(s.sigma, 10),
            format_sig(baseline + k * s.sigma, 10),
            format_sig(baseline - k * s.sigma, 10)
        );
    }
    out
}

pub fn xy_csv(points: impl IntoIterator<Item = (f64, f64)>) -> String {
    let mut out = String::from("x,y\n");
    for (x, y) in points {
        let _ = writeln!(out, "{},{}", format_sig(x, 10), format_sig(y, 10));
    }
    out
}

pub fn qq_csv(qq: &QqPlotData) -> String {
    xy_csv(qq.points.iter().map(|p| (p.theoretical, p.sample)))
}

pub fn density_csv(bins: &[HistogramBin]) -> String {
    xy_csv(bins.iter().map(|b| (b.center, b.density)))
}

#[cfg(test)]
mod tests {
    use super::format_sig;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (0.05, "0.05"),
            (-0.01451742334, "-0.01451742334"),
            (1.0 / 3.0, "0.3333333333"),
            (123456789012.0, "1.23456789e+11"),
            (0.00001234, "1.234e-05"),
            (0.0001234, "0.0001234"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (9999999999.5, "1e+10"),
            (0.0, "0"),
        ];
        for (x, want) in cases {
            assert_eq!(format_sig(x, 10), want, "{x}");
        }
    }
}
