#![allow(dead_code)]

use std::path::PathBuf;

use sigmarev_core::{Transport, TransportError};

pub fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn fixture(rel: &str) -> String {
    root()
        .join("fixtures")
        .join(rel)
        .to_string_lossy()
        .into_owned()
}

/// Transport for commands that must never touch the network.
pub struct Offline;

impl Transport for Offline {
    fn get(&self, url: &str) -> Result<String, TransportError> {
        panic!("unexpected network access to {url}");
    }
}

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_with(args: &[&str], transport: &dyn Transport) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("sigmarev").chain(args.iter().copied());
    let code = sigmarev_cli::run(argv, &mut out, &mut err, transport);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

pub fn run(args: &[&str]) -> Output {
    run_with(args, &Offline)
}

/// The four end-to-end reports kept under fixtures/golden.
pub fn golden_cases() -> Vec<(&'static str, Vec<String>)> {
    let p = |t: &str| fixture(&format!("prices/{t}.csv"));
    vec![
        (
            "analyze_RIMMH",
            vec!["--deterministic".into(), "analyze".into(), p("RIMMH")],
        ),
        (
            "correlate_AAPL_IXIC",
            vec![
                "--deterministic".into(),
                "correlate".into(),
                p("AAPL"),
                p("IXIC"),
            ],
        ),
        (
            "backtest_hist",
            vec![
                "--deterministic".into(),
                "backtest".into(),
                p("AAPLH"),
                p("RIMMH"),
                p("YHOOH"),
            ],
        ),
        (
            "screen_universe",
            vec![
                "--deterministic".into(),
                "screen".into(),
                fixture("universe/manifest.txt"),
            ],
        ),
    ]
}

pub fn golden_path(name: &str) -> PathBuf {
    root().join("fixtures/golden").join(format!("{name}.json"))
}

pub fn oracle(name: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(root().join("fixtures/oracle").join(format!("{name}.json")))
        .unwrap();
    serde_json::from_str(&text).unwrap()
}
