use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::CommandFactory;
use sigmarev_core::export::{bands_csv, density_csv, format_sig, qq_csv};
use sigmarev_core::market_data::{load_series, DataError};
use sigmarev_core::normality::histogram_breaks;
use sigmarev_core::returns::daily_returns_from;
use sigmarev_core::stats::align_by_date;
use sigmarev_core::{
    correlation, covariance, density_histogram, evaluate_signal, fetch_remote, qq_plot_data,
    rolling_sigma, run_backtest, sample_stats, save_series, screen, shapiro_wilk, BacktestError,
    BacktestReport, BandConfig, BinRule, PriceField, PriceSeries, ReturnSeries, ScreenConfig,
    ScreenError, ScreenResult, SignalError, Ticker, Transport,
};

use crate::args::{
    AnalyzeArgs, BacktestArgs, Cli, Command, CorrelateArgs, FetchArgs, FormatArg, ReturnArgs,
    SampleArg, ScreenArgs,
};
use crate::report::{Analysis, Correlation, Payload, ReportEnvelope};
use crate::CliError;

type CmdResult = Result<(), CliError>;

pub(crate) fn dispatch(
    cli: Cli,
    out: &mut dyn Write,
    err: &mut dyn Write,
    transport: &dyn Transport,
) -> CmdResult {
    let det = cli.deterministic;
    match cli.command {
        Command::Fetch(a) => fetch(a, out, transport),
        Command::Analyze(a) => emit(out, Payload::Analysis(Box::new(analyze(a)?)), det),
        Command::Correlate(a) => emit(out, Payload::Correlation(correlate(a)?), det),
        Command::Backtest(a) => emit(out, Payload::Backtest(Box::new(backtest(a)?)), det),
        Command::Screen(a) => {
            let format = a.format;
            let result = screen_cmd(a)?;
            let table = screen_table(&result);
            match format {
                FormatArg::Json => emit(out, Payload::Screen(result), det),
                FormatArg::Table => write_out(out, &table),
                FormatArg::Both => {
                    write_out(err, &table)?;
                    emit(out, Payload::Screen(result), det)
                }
            }
        }
        Command::Config => write_out(out, &config_table()),
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> CmdResult {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::io("writing output", e))
}

fn emit(out: &mut dyn Write, payload: Payload, deterministic: bool) -> CmdResult {
    write_out(out, &ReportEnvelope::new(payload, deterministic).to_json())
}

fn write_file(path: &Path, contents: &str) -> CmdResult {
    fs::write(path, contents).map_err(|e| CliError::io(path.display(), e))
}

fn with_path(path: &Path, e: CliError) -> CliError {
    match e {
        CliError::Data {
            module,
            kind,
            message,
        } => CliError::Data {
            module,
            kind,
            message: format!("{}: {message}", path.display()),
        },
        usage => usage,
    }
}

fn check_band(config: &BandConfig) -> CmdResult {
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn check_alpha(alpha: f64) -> CmdResult {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "--alpha must lie in (0, 1), got {alpha}"
        )))
    }
}

/// Ticker taken from the file name: `data/aapl.csv` is AAPL.
fn ticker_for(path: &Path) -> Result<Ticker, CliError> {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or_default();
    Ticker::new(stem.to_uppercase()).map_err(|e| CliError::data("market_data", e))
}

fn load(path: &Path) -> Result<PriceSeries, CliError> {
    let ticker = ticker_for(path).map_err(|e| with_path(path, e))?;
    load_series(ticker, path).map_err(|e| with_path(path, data_error(e)))
}

fn data_error(e: DataError) -> CliError {
    match e {
        DataError::Io(msg) => CliError::Data {
            module: "io",
            kind: String::new(),
            message: msg,
        },
        other => CliError::data("market_data", other),
    }
}

fn returns_of(
    path: &Path,
    series: &PriceSeries,
    args: &ReturnArgs,
) -> Result<ReturnSeries, CliError> {
    daily_returns_from(series, args.mode.into(), args.field())
        .map_err(|e| with_path(path, CliError::data("returns", e)))
}

fn fetch(args: FetchArgs, out: &mut dyn Write, transport: &dyn Transport) -> CmdResult {
    if args.from > args.to {
        return Err(CliError::Usage(format!(
            "--from {} is after --to {}",
            args.from, args.to
        )));
    }
    let ticker =
        Ticker::new(args.ticker.to_uppercase()).map_err(|e| CliError::Usage(e.to_string()))?;
    let series = fetch_remote(transport, &ticker, args.from, args.to, &args.endpoint).map_err(
        |e| match e {
            DataError::InvalidEndpoint(_) => CliError::Usage(e.to_string()),
            other => data_error(other),
        },
    )?;
    if series.is_empty() {
        return Err(CliError::Data {
            module: "market_data",
            kind: "EmptyInput".into(),
            message: format!("no bars for {ticker} between {} and {}", args.from, args.to),
        });
    }
    let path = args
        .out
        .unwrap_or_else(|| PathBuf::from(format!("{ticker}.csv")));
    save_series(&series, &path).map_err(|e| with_path(&path, data_error(e)))?;
    write_out(
        out,
        &format!(
            "wrote {} bars for {ticker} to {}\n",
            series.len(),
            path.display()
        ),
    )
}

fn analyze(args: AnalyzeArgs) -> Result<Analysis, CliError> {
    let config = args.band.config();
    check_band(&config)?;
    check_alpha(args.alpha)?;
    let path = &args.csv;
    let series = load(path)?;
    let returns = returns_of(path, &series, &args.band.returns)?;
    let values = returns.values();
    let last = returns
        .last_date()
        .expect("daily_returns yields at least one point");

    let return_stats =
        sample_stats(&values).map_err(|e| with_path(path, CliError::data("stats", e)))?;
    let signal = evaluate_signal(&returns, last, &config)
        .map_err(|e| with_path(path, CliError::data("signal", e)))?;

    // The signal above already guarantees `window` returns before `last`.
    let plotted: &[f64] = match args.normality_sample {
        SampleArg::Window => &values[values.len() - 1 - config.window..values.len() - 1],
        SampleArg::Full | SampleArg::BinBreaks => &values,
    };
    let tested = match args.normality_sample {
        SampleArg::BinBreaks => histogram_breaks(plotted)
            .map_err(|e| with_path(path, CliError::data("normality", e)))?,
        _ => plotted.to_vec(),
    };
    let normality = shapiro_wilk(&tested, args.alpha)
        .map_err(|e| with_path(path, CliError::data("normality", e)))?
        .summary();

    let mut plot_files = Vec::new();
    if args.emit_plots {
        let dir = match &args.plots_dir {
            Some(d) => d.clone(),
            None => path.parent().map(Path::to_path_buf).unwrap_or_default(),
        };
        fs::create_dir_all(&dir).map_err(|e| CliError::io(dir.display(), e))?;
        let norm_err = |e| with_path(path, CliError::data("normality", e));
        let bins = density_histogram(plotted, BinRule::Sturges).map_err(norm_err)?;
        let qq = qq_plot_data(plotted).map_err(norm_err)?;
        let sigmas = rolling_sigma(&returns, &config)
            .map_err(|e| with_path(path, CliError::data("signal", e)))?;
        let ticker = series.ticker();
        let files = [
            (format!("{ticker}.density.csv"), density_csv(&bins)),
            (format!("{ticker}.qq.csv"), qq_csv(&qq)),
            (
                format!("{ticker}.bands.csv"),
                bands_csv(&sigmas, config.k, config.mode.baseline()),
            ),
        ];
        for (name, body) in files {
            write_file(&dir.join(&name), &body)?;
            plot_files.push(name);
        }
    }

    Ok(Analysis {
        ticker: series.ticker().clone(),
        first_date: returns.points()[0].date,
        last_date: last,
        n_bars: series.len(),
        mode: config.mode,
        price_field: args.band.returns.field(),
        return_stats,
        normality_sample: args.normality_sample.into(),
        normality,
        signal,
        plot_files,
    })
}

fn correlate(args: CorrelateArgs) -> Result<Correlation, CliError> {
    let (a, b) = (load(&args.csv_a)?, load(&args.csv_b)?);
    let ra = returns_of(&args.csv_a, &a, &args.returns)?;
    let rb = returns_of(&args.csv_b, &b, &args.returns)?;
    let stats_err = |e| CliError::data("stats", e);
    let aligned = align_by_date(&ra, &rb).map_err(stats_err)?;
    let cov = covariance(&aligned.left, &aligned.right).map_err(stats_err)?;
    let r = correlation(&aligned.left, &aligned.right).map_err(stats_err)?;
    Ok(Correlation {
        left: a.ticker().clone(),
        right: b.ticker().clone(),
        mode: args.returns.mode.into(),
        price_field: args.returns.field(),
        n_aligned: aligned.dates.len(),
        first_date: aligned.dates[0],
        last_date: *aligned.dates.last().expect("aligned is non-empty"),
        covariance: cov,
        correlation: r,
    })
}

fn backtest(args: BacktestArgs) -> Result<BacktestReport, CliError> {
    let config = args.band.config();
    check_band(&config)?;
    let mut serieses = Vec::with_capacity(args.csvs.len());
    for path in &args.csvs {
        let prices = load(path)?;
        serieses.push(returns_of(path, &prices, &args.band.returns)?);
    }
    let report = run_backtest(&serieses, &config).map_err(|e| match e {
        BacktestError::Signal(SignalError::InvalidConfig(m)) => CliError::Usage(m),
        other => CliError::data("backtest", other),
    })?;
    if let Some(path) = &args.events_csv {
        write_file(path, &events_csv(&report))?;
    }
    Ok(report)
}

pub fn events_csv(report: &BacktestReport) -> String {
    let mut out = String::from(
        "Ticker,TriggerDate,TriggerReturn,Band,NextDate,NextReturn,RevertedPositive\n",
    );
    for e in &report.events {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            e.ticker,
            e.trigger_date,
            format_sig(e.trigger_return, 10),
            format_sig(e.band, 10),
            e.next_date,
            format_sig(e.next_return, 10),
            e.reverted_positive
        );
    }
    out
}

fn read_manifest(path: &Path) -> Result<Vec<Ticker>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    let mut tickers: Vec<Ticker> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let entry = line.split('#').next().unwrap_or_default().trim();
        if entry.is_empty() {
            continue;
        }
        let ticker = Ticker::new(entry.to_uppercase()).map_err(|e| {
            with_path(
                path,
                CliError::data("market_data", format!("line {}: {e}", i + 1)),
            )
        })?;
        if tickers.contains(&ticker) {
            return Err(with_path(
                path,
                CliError::data(
                    "market_data",
                    format!("line {}: duplicate ticker {ticker}", i + 1),
                ),
            ));
        }
        tickers.push(ticker);
    }
    Ok(tickers)
}

fn screen_cmd(args: ScreenArgs) -> Result<ScreenResult, CliError> {
    let band = args.band.config();
    check_band(&band)?;
    check_alpha(args.alpha)?;
    let tickers = read_manifest(&args.manifest)?;
    let dir = match &args.data_dir {
        Some(d) => d.clone(),
        None => args
            .manifest
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default(),
    };
    let mut universe = Vec::with_capacity(tickers.len());
    for t in tickers {
        let path = dir.join(format!("{t}.csv"));
        universe.push(load_series(t, &path).map_err(|e| with_path(&path, data_error(e)))?);
    }
    let config = ScreenConfig {
        band,
        alpha: args.alpha,
        min_history: args.min_history,
        staleness: args.staleness,
        as_of: args.as_of,
        normality_sample: args.normality_sample.into(),
        price_field: if args.band.returns.adjusted {
            PriceField::AdjClose
        } else {
            PriceField::Close
        },
    };
    screen(&universe, &config).map_err(|e| match e {
        ScreenError::EmptyUniverse => CliError::Usage(format!(
            "screener error (EmptyUniverse): {}",
            args.manifest.display()
        )),
        ScreenError::Signal(s) => CliError::Usage(s.to_string()),
        ScreenError::InvalidAlpha(_) => CliError::Usage(e.to_string()),
    })
}

fn screen_table(r: &ScreenResult) -> String {
    let mut s = format!("as of {}: {} candidate(s)\n", r.as_of, r.candidates.len());
    if !r.candidates.is_empty() {
        let _ = writeln!(
            s,
            "{:<4} {:<10} {:>10} {:>10} {:>7} {:>7} {:>10}",
            "RANK", "TICKER", "RETURN", "BAND", "RATIO", "W", "P"
        );
        for (i, c) in r.candidates.iter().enumerate() {
            let _ = writeln!(
                s,
                "{:<4} {:<10} {:>10.6} {:>10.6} {:>7.3} {:>7.4} {:>10.4}",
                i + 1,
                c.ticker,
                c.today_return,
                c.band,
                c.breach_ratio,
                c.normality.w,
                c.normality.p_value
            );
        }
    }
    if !r.skipped.is_empty() {
        s.push_str("skipped:\n");
        for k in &r.skipped {
            let reason = serde_json::to_value(k.reason)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default();
            let _ = writeln!(s, "  {:<10} {:<22} {}", k.ticker, reason, k.detail);
        }
    }
    s
}

/// Every flag with an environment override, read back from the argument
/// definitions so the table cannot drift from the parser.
fn config_table() -> String {
    let mut rows: BTreeMap<String, (String, BTreeMap<String, Vec<String>>)> = BTreeMap::new();
    let root = Cli::command();
    let global = root
        .get_arguments()
        .map(|a| ("(all)".to_string(), a.clone()))
        .collect::<Vec<_>>();
    let per_command = root.get_subcommands().flat_map(|sub| {
        sub.get_arguments()
            .map(move |a| (sub.get_name().to_string(), a.clone()))
    });
    for (cmd, arg) in global.into_iter().chain(per_command) {
        let (Some(long), Some(env)) = (arg.get_long(), arg.get_env()) else {
            continue;
        };
        let default = arg
            .get_default_values()
            .iter()
            .map(|v| v.to_string_lossy().into_owned())
            .collect::<Vec<_>>();
        let default = if default.is_empty() {
            if arg.get_action().takes_values() {
                "-".to_string()
            } else {
                "false".to_string()
            }
        } else {
            default.join(",")
        };
        let row = rows
            .entry(format!("--{long}"))
            .or_insert_with(|| (env.to_string_lossy().into_owned(), BTreeMap::new()));
        row.1.entry(default).or_default().push(cmd);
    }
    let mut s = format!("{:<26} {:<34} {}\n", "FLAG", "ENVIRONMENT", "DEFAULT");
    for (flag, (env, defaults)) in rows {
        let default = if defaults.len() == 1 {
            defaults.into_keys().next().unwrap_or_default()
        } else {
            defaults
                .into_iter()
                .map(|(d, cmds)| format!("{d} ({})", cmds.join(", ")))
                .collect::<Vec<_>>()
                .join("; ")
        };
        let _ = writeln!(s, "{flag:<26} {env:<34} {default}");
    }
    s
}
