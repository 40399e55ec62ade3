mod common;

use proptest::prelude::*;
use sigmarev_core::export::returns_csv;
use sigmarev_core::market_data::load_series;
use sigmarev_core::stats::sample_stats;
use sigmarev_core::{
    align_by_date, correlation, covariance, daily_returns, standard_score, ReturnMode, Ticker,
};

#[test]
fn aapl_returns_match_golden_file() {
    let prices = load_series(
        Ticker::new("AAPL").unwrap(),
        &common::fixture("prices/AAPL.csv"),
    )
    .unwrap();
    let returns = daily_returns(&prices, ReturnMode::Simple).unwrap();
    assert_eq!(returns.len(), prices.len() - 1);
    let golden = std::fs::read_to_string(common::fixture("golden/AAPL.returns.csv")).unwrap();
    assert_eq!(returns_csv(&returns), golden);
}

#[test]
fn aapl_vs_index_correlation_matches_oracle() {
    let load = |t: &str| {
        let p = load_series(
            Ticker::new(t).unwrap(),
            &common::fixture(&format!("prices/{t}.csv")),
        )
        .unwrap();
        daily_returns(&p, ReturnMode::Simple).unwrap()
    };
    let oracle: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(common::fixture("oracle/correlate_AAPL_IXIC.json")).unwrap(),
    )
    .unwrap();
    let aligned = align_by_date(&load("AAPL"), &load("IXIC")).unwrap();
    assert_eq!(aligned.left.len() as u64, oracle["n"].as_u64().unwrap());
    let r = correlation(&aligned.left, &aligned.right).unwrap();
    assert!(
        (r - oracle["correlation"].as_f64().unwrap()).abs() < 1e-12,
        "{r}"
    );
}

fn closes() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1e5, 2..60)
}

fn sample() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, 3..80).prop_filter("needs spread", |xs| {
        xs.iter().any(|x| (x - xs[0]).abs() > 1e-3)
    })
}

proptest! {
    #[test]
    fn simple_is_ratio_minus_one(cs in closes()) {
        let rets: Vec<f64> = cs.windows(2).map(|w| w[1] / w[0] - 1.0).collect();
        let p = common::price_series("X", &rets, common::start());
        let simple = daily_returns(&p, ReturnMode::Simple).unwrap().values();
        let ratio = daily_returns(&p, ReturnMode::Ratio).unwrap().values();
        for (s, r) in simple.iter().zip(&ratio) {
            prop_assert!((s - (r - 1.0)).abs() <= 1e-15 * r.abs().max(1.0));
            prop_assert!(*s > -1.0);
        }
    }

    #[test]
    fn returns_ignore_price_scale(cs in closes(), scale in 1e-3f64..1e3) {
        let rets: Vec<f64> = cs.windows(2).map(|w| w[1] / w[0] - 1.0).collect();
        let a = common::price_series("X", &rets, common::start());
        let mut bars = a.bars().to_vec();
        for b in &mut bars {
            b.open *= scale; b.high *= scale; b.low *= scale; b.close *= scale; b.adj_close *= scale;
        }
        let b = sigmarev_core::PriceSeries::new(Ticker::new("X").unwrap(), bars).unwrap();
        let ra = daily_returns(&a, ReturnMode::Simple).unwrap().values();
        let rb = daily_returns(&b, ReturnMode::Simple).unwrap().values();
        for (x, y) in ra.iter().zip(&rb) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn correlation_is_symmetric_and_bounded(pair in (3usize..60).prop_flat_map(|n| {
        (prop::collection::vec(-1e3f64..1e3, n), prop::collection::vec(-1e3f64..1e3, n))
    })) {
        let (xs, ys) = pair;
        if let (Ok(a), Ok(b)) = (correlation(&xs, &ys), correlation(&ys, &xs)) {
            prop_assert_eq!(a, b);
            prop_assert!(a.abs() <= 1.0);
        }
    }

    #[test]
    fn correlation_survives_positive_affine_maps(xs in sample(), a in 1e-3f64..1e3, b in -1e3f64..1e3) {
        let ys: Vec<f64> = xs.iter().enumerate().map(|(i, x)| x * x + i as f64).collect();
        let mapped: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
        let r0 = correlation(&xs, &ys).unwrap();
        let r1 = correlation(&mapped, &ys).unwrap();
        prop_assert!((r0 - r1).abs() <= 1e-9, "{} vs {}", r0, r1);
    }

    #[test]
    fn covariance_with_self_is_variance(xs in sample()) {
        let v = sample_stats(&xs).unwrap().variance;
        let c = covariance(&xs, &xs).unwrap();
        prop_assert!((c - v).abs() <= 1e-12 * v.abs());
    }

    #[test]
    fn standard_score_sign_follows_deviation(xs in sample(), x in -2e3f64..2e3) {
        let s = standard_score(x, &xs).unwrap();
        let dev = x - s.mean;
        prop_assert_eq!(s.value > 0.0, dev > 0.0);
        prop_assert_eq!(s.value < 0.0, dev < 0.0);
    }
}
