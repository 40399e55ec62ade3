//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs without the libtest harness so the lines always
//! reach the terminal.

mod common;

use std::time::{Duration, Instant};

use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use sigmarev_core::calendar::weekdays_from;
use sigmarev_core::market_data::load_series;
use sigmarev_core::{
    correlation, covariance, daily_returns, evaluate_signal, momentum_estimate,
    outside_band_fraction, parse_csv, run_backtest, sample_stats, save_series, shapiro_wilk,
    BandConfig, OhlcBar, PriceSeries, ReturnMode, ReturnPoint, ReturnSeries, Ticker,
};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'a str, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn return_series(name: &str, values: Vec<f64>) -> ReturnSeries {
    let dates = weekdays_from(NaiveDate::from_ymd_opt(2006, 1, 2).unwrap(), values.len());
    let points = dates
        .into_iter()
        .zip(values)
        .map(|(date, value)| ReturnPoint { date, value })
        .collect();
    ReturnSeries::new(Ticker::new(name).unwrap(), ReturnMode::Simple, points).unwrap()
}

/// Ten tickers of 1500 i.i.d. Gaussian daily returns (σ = 2 %).
fn gaussian_bundle() -> Vec<ReturnSeries> {
    let mut r = rng(20070101);
    (0..10)
        .map(|i| {
            let values = (0..1500)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut r);
                    0.02 * z
                })
                .collect::<Vec<f64>>();
            return_series(&format!("SYN{i}"), values)
        })
        .collect()
}

fn rejection_rate(seed: u64, trials: usize, draw: impl Fn(&mut ChaCha8Rng) -> f64) -> f64 {
    let mut r = rng(seed);
    let rejected = (0..trials)
        .filter(|_| {
            let xs: Vec<f64> = (0..50).map(|_| draw(&mut r)).collect();
            shapiro_wilk(&xs, 0.05).unwrap().reject_normality
        })
        .count();
    rejected as f64 / trials as f64
}

fn c1_exact_n3() -> Outcome {
    let w = shapiro_wilk(&[1.0, 2.0, 3.0], 0.05)
        .map_err(|e| e.to_string())?
        .w;
    check((w - 1.0).abs() <= 1e-9, format!("W([1,2,3]) = {w:.15}"))
}

fn c2_calibration() -> Outcome {
    let t = Instant::now();
    let rate = rejection_rate(31, 2000, |r| StandardNormal.sample(r));
    let secs = t.elapsed().as_secs_f64();
    check(
        (0.03..=0.07).contains(&rate) && secs < 5.0,
        format!(
            "2000 N(0,1) samples of n = 50: rejection rate {rate:.4} at alpha 0.05 in {secs:.2} s"
        ),
    )
}

fn c3_power() -> Outcome {
    let t = Instant::now();
    let rate = rejection_rate(32, 2000, |r| Exp1.sample(r));
    let secs = t.elapsed().as_secs_f64();
    check(
        rate > 0.80 && secs < 5.0,
        format!("2000 Exp(1) samples of n = 50: rejection rate {rate:.4} in {secs:.2} s"),
    )
}

fn c4_affine() -> Outcome {
    let mut r = rng(33);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = r.random_range(3..=500);
        let xs: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut r)).collect();
        let a = 10f64.powf(r.random_range(-3.0..3.0));
        let b = r.random_range(-1e3..1e3);
        let ys: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
        let w0 = shapiro_wilk(&xs, 0.05).map_err(|e| e.to_string())?.w;
        let w1 = shapiro_wilk(&ys, 0.05).map_err(|e| e.to_string())?.w;
        worst = worst.max((w0 - w1).abs());
    }
    check(
        worst <= 1e-9,
        format!("max |W(ax+b) - W(x)| over 100 samples = {worst:.2e}"),
    )
}

fn c5_stats() -> Outcome {
    let e = |x: Result<f64, _>| x.map_err(|e: sigmarev_core::StatsError| e.to_string());
    let s = sample_stats(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).map_err(|e| e.to_string())?;
    let one = sample_stats(&[1.0, 2.0, 3.0]).map_err(|e| e.to_string())?;
    let x = [1.0, 2.0, 3.0];
    let wobbly = [0.013, -0.021, 0.004, 0.019, -0.007, 0.0, 0.011];
    let neg: Vec<f64> = wobbly.iter().map(|v| -v).collect();
    let pairs = [
        (s.mean, 5.0),
        (s.variance, 32.0 / 7.0),
        (one.variance, 1.0),
        (one.std_dev, 1.0),
        (e(covariance(&x, &x))?, 1.0),
        (e(covariance(&x, &[3.0, 2.0, 1.0]))?, -1.0),
        (e(covariance(&x, &[5.0, 5.0, 5.0]))?, 0.0),
        (e(correlation(&wobbly, &wobbly))?, 1.0),
        (e(correlation(&wobbly, &neg))?, -1.0),
    ];
    let worst = pairs
        .iter()
        .map(|(got, want)| (got - want).abs())
        .fold(0.0, f64::max);
    check(
        worst <= 1e-12,
        format!("{} fixed-vector values, max error {worst:.2e}", pairs.len()),
    )
}

fn c6_coverage(bundle: &[ReturnSeries]) -> Outcome {
    let t = Instant::now();
    let config = BandConfig::default();
    let fracs = bundle
        .iter()
        .map(|s| outside_band_fraction(s, &config).map_err(|e| e.to_string()))
        .collect::<Result<Vec<f64>, _>>()?;
    let pooled = fracs.iter().sum::<f64>() / fracs.len() as f64;
    let (lo, hi) = fracs
        .iter()
        .fold((1.0f64, 0.0f64), |(lo, hi), f| (lo.min(*f), hi.max(*f)));
    let secs = t.elapsed().as_secs_f64();
    check(
        (pooled - 0.0455).abs() <= 0.015 && secs < 5.0,
        format!("10 x 1500 Gaussian days, k = 2: outside fraction {pooled:.4} (per ticker {lo:.4}..{hi:.4}) in {secs:.2} s"),
    )
}

fn c7_reversion_null(bundle: &[ReturnSeries]) -> Outcome {
    let t = Instant::now();
    let report = run_backtest(bundle, &BandConfig::default()).map_err(|e| e.to_string())?;
    let n = report.n_triggers as f64;
    let p = report.p_positive.ok_or("no triggers")?;
    let half = 2.576 * (0.25 / n).sqrt();
    let secs = t.elapsed().as_secs_f64();
    check(
        (p - 0.5).abs() <= half && secs < 5.0,
        format!("p_positive {p:.4} over {n} triggers, 99% bound 0.5 +/- {half:.4}, in {secs:.2} s"),
    )
}

fn c8_no_lookahead() -> Outcome {
    let path = common::root().join("fixtures/prices/RIMMH.csv");
    let prices = load_series(Ticker::new("RIMMH").unwrap(), &path).map_err(|e| e.to_string())?;
    let full = daily_returns(&prices, ReturnMode::Simple).map_err(|e| e.to_string())?;
    let config = BandConfig::default();
    let mut r = rng(38);
    let mut compared = 0;
    for _ in 0..50 {
        let cut = r.random_range(config.window..full.len());
        let head = full.truncated(full.points()[cut].date);
        for p in &full.points()[config.window..=cut] {
            if evaluate_signal(&full, p.date, &config) != evaluate_signal(&head, p.date, &config) {
                return Err(format!(
                    "decision on {} changed after truncating at {}",
                    p.date,
                    full.points()[cut].date
                ));
            }
            compared += 1;
        }
    }
    Ok(format!(
        "50 cut points, {compared} decisions identical before and after truncation"
    ))
}

fn c9_momentum() -> Outcome {
    let mut r = rng(39);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let a: f64 = r.random_range(-0.05..0.05);
        let b: f64 = r.random_range(-0.0005..0.0005);
        let n = r.random_range(3..600);
        let pairs = r.random_range(1..n.min(20));
        let values: Vec<f64> = (0..=n).map(|i| a + b * i as f64).collect();
        let s = return_series("LIN", values[..n].to_vec());
        let m = momentum_estimate(&s, s.points()[n - 1].date, pairs).map_err(|e| e.to_string())?;
        worst = worst.max((m.r1_forecast - values[n]).abs());
    }
    check(
        worst <= 1e-12,
        format!("200 linear return paths, max |forecast - next| = {worst:.2e}"),
    )
}

fn c10_golden() -> Outcome {
    let mut matched = Vec::new();
    for (name, args) in common::golden_cases() {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = common::run(&refs);
        if out.code != 0 {
            return Err(format!("{name}: exit {} {}", out.code, out.stderr.trim()));
        }
        let expected = std::fs::read_to_string(common::golden_path(name))
            .map_err(|e| format!("{name}: {e}"))?;
        if out.stdout != expected {
            return Err(format!(
                "{name}: output differs from fixtures/golden/{name}.json"
            ));
        }
        matched.push(name);
    }
    Ok(format!("byte-identical: {}", matched.join(", ")))
}

fn random_series(r: &mut ChaCha8Rng) -> PriceSeries {
    let n = r.random_range(0..60);
    let mut date = NaiveDate::from_ymd_opt(1990, 1, 1).unwrap();
    let mut bars = Vec::with_capacity(n);
    let price = |r: &mut ChaCha8Rng| {
        r.random_range(1u64..5_000_000_000) as f64 / 10f64.powi(r.random_range(0..=6))
    };
    for _ in 0..n {
        date = date
            .checked_add_days(Days::new(r.random_range(1..5)))
            .unwrap();
        let (open, close) = (price(r), price(r));
        let high = open.max(close) + price(r);
        let low = open.min(close) * r.random_range(0.01..1.0);
        bars.push(OhlcBar {
            date,
            open,
            high,
            low,
            close,
            adj_close: price(r),
            volume: r.random(),
        });
    }
    PriceSeries::new(Ticker::new("RT").unwrap(), bars).unwrap()
}

fn c11_round_trip() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("RT.csv");
    let mut r = rng(41);
    for i in 0..1000 {
        let s = random_series(&mut r);
        save_series(&s, &path).map_err(|e| e.to_string())?;
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let back =
            parse_csv(Ticker::new("RT").unwrap(), &text).map_err(|e| format!("series {i}: {e}"))?;
        if back != s {
            return Err(format!("series {i} did not survive save/parse"));
        }
    }
    Ok("1000 random series identical after save then parse".into())
}

fn main() {
    let start = Instant::now();
    let bundle = gaussian_bundle();
    let criteria: Vec<Criterion> = vec![
        ("Shapiro-Wilk exact at n = 3", Box::new(c1_exact_n3)),
        (
            "Shapiro-Wilk calibration under N(0,1)",
            Box::new(c2_calibration),
        ),
        ("Shapiro-Wilk power against Exp(1)", Box::new(c3_power)),
        ("W affine invariance", Box::new(c4_affine)),
        ("stats fixed-vector oracles", Box::new(c5_stats)),
        (
            "band coverage on Gaussian data",
            Box::new(|| c6_coverage(&bundle)),
        ),
        (
            "reversion null on Gaussian data",
            Box::new(|| c7_reversion_null(&bundle)),
        ),
        ("no lookahead", Box::new(c8_no_lookahead)),
        ("momentum exactness", Box::new(c9_momentum)),
        ("golden end-to-end reports", Box::new(c10_golden)),
        ("CSV round trip", Box::new(c11_round_trip)),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        failures += report(i + 1, name, outcome);
    }
    // A whole-suite timer cannot run inside the suite; the acceptance run is
    // the slowest target and stands in for it.
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(60);
    failures += report(
        12,
        "runtime budget",
        check(
            elapsed < budget,
            format!(
                "acceptance criteria 1-11 took {:.2} s of a 60 s budget",
                elapsed.as_secs_f64()
            ),
        ),
    );
    println!("acceptance: {} of 12 criteria passed", 12 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}

fn report(id: usize, name: &str, outcome: Outcome) -> usize {
    match outcome {
        Ok(detail) => {
            println!("PASS  criterion {id:>2}: {name}: {detail}");
            0
        }
        Err(detail) => {
            println!("FAIL  criterion {id:>2}: {name}: {detail}");
            1
        }
    }
}
