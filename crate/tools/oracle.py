#!/usr/bin/env python3
"""Independent reference values for the golden tests.

Recomputes every checked quantity straight from the fixture CSVs with
numpy/scipy and plain loops, sharing no code with the Rust crates.
Run from the repository root: python3 tools/oracle.py
"""
import csv
import json
import os

import numpy as np
from scipy import stats

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")
WINDOW = 252
K = 2.0
ALPHA = 0.05


def load(path):
    with open(path) as f:
        rows = list(csv.DictReader(f))
    rows.sort(key=lambda r: r["Date"])
    return [r["Date"] for r in rows], [float(r["Close"]) for r in rows]


def simple_returns(path):
    dates, closes = load(path)
    return dates[1:], [closes[i] / closes[i - 1] - 1.0 for i in range(1, len(closes))]


def dump(name, obj):
    with open(f"{ROOT}/oracle/{name}", "w") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")


def returns_golden():
    dates, rets = simple_returns(f"{ROOT}/prices/AAPL.csv")
    with open(f"{ROOT}/golden/AAPL.returns.csv", "w") as f:
        f.write("Date,Return\n")
        for d, r in zip(dates, rets):
            f.write(f"{d},{r:.10g}\n")


def correlation():
    da, ra = simple_returns(f"{ROOT}/prices/AAPL.csv")
    db, rb = simple_returns(f"{ROOT}/prices/IXIC.csv")
    common = sorted(set(da) & set(db))
    xa = [ra[da.index(d)] for d in common]
    xb = [rb[db.index(d)] for d in common]
    n = len(xa)
    ma, mb = sum(xa) / n, sum(xb) / n
    cov = sum((a - ma) * (b - mb) for a, b in zip(xa, xb)) / (n - 1)
    sa = (sum((a - ma) ** 2 for a in xa) / (n - 1)) ** 0.5
    sb = (sum((b - mb) ** 2 for b in xb) / (n - 1)) ** 0.5
    dump("correlate_AAPL_IXIC.json", {
        "n": n,
        "correlation": cov / (sa * sb),
        "numpy_corrcoef": float(np.corrcoef(xa, xb)[0, 1]),
    })


def normal50():
    with open(f"{ROOT}/oracle/normal50.txt") as f:
        xs = [float(line) for line in f if line.strip()]
    r = stats.shapiro(xs)
    dump("normal50.json", {"n": len(xs), "w": float(r.statistic), "p_value": float(r.pvalue)})


def swilk_cases():
    rng = np.random.default_rng(94)
    draw = {
        "normal": lambda n: rng.standard_normal(n),
        "exponential": lambda n: rng.exponential(1.0, n),
        "uniform": lambda n: rng.uniform(-1.0, 1.0, n),
    }
    cases = []
    for n in (4, 5, 7, 11, 12, 20, 35, 100, 400, 1500):
        for kind, f in draw.items():
            xs = [float(x) for x in f(n)]
            r = stats.shapiro(xs)
            cases.append({"kind": kind, "n": n, "w": float(r.statistic), "p_value": float(r.pvalue), "xs": xs})
    dump("swilk_cases.json", cases)


def sd(xs):
    return float(np.std(np.asarray(xs), ddof=1))


def analyze():
    dates, rets = simple_returns(f"{ROOT}/prices/RIMMH.csv")
    sw = stats.shapiro(rets)
    sigma = sd(rets[-WINDOW - 1:-1])
    band = K * sigma
    today = rets[-1]
    slope = rets[-1] - rets[-2]
    dump("analyze_RIMMH.json", {
        "date": dates[-1],
        "n_returns": len(rets),
        "w": float(sw.statistic),
        "p_value": float(sw.pvalue),
        "today_return": today,
        "sigma": sigma,
        "band": band,
        "triggered": abs(today) > band,
        "slope": slope,
        "forecast": today + slope,
    })


def backtest():
    events = []
    open_triggers = 0
    for name in ["AAPLH", "RIMMH", "YHOOH"]:
        dates, rets = simple_returns(f"{ROOT}/prices/{name}.csv")
        for i in range(WINDOW, len(rets)):
            sigma = sd(rets[i - WINDOW:i])
            if sigma == 0:
                continue
            band = K * sigma
            if abs(rets[i]) > band:
                if i + 1 < len(rets):
                    nxt = rets[i + 1]
                    events.append((name, dates[i], nxt, band))
                else:
                    open_triggers += 1
    n = len(events)
    pos = sum(1 for e in events if e[2] > 0)
    within = sum(1 for e in events if 0 < e[2] <= e[3])
    per = {}
    for name, _, nxt, _ in events:
        c = per.setdefault(name, [0, 0])
        c[0] += 1
        c[1] += nxt > 0
    dump("backtest_hist.json", {
        "n_triggers": n,
        "open_triggers": open_triggers,
        "p_positive": pos / n,
        "p_within_range": within / n,
        "mean_next_return": sum(e[2] for e in events) / n,
        "per_ticker": {k: {"n_triggers": v[0], "n_positive": v[1]} for k, v in per.items()},
        "trigger_dates": [[e[0], e[1]] for e in events],
    })


def busdays_between(a, b):
    return int(np.busday_count(np.datetime64(a), np.datetime64(b)))


def screen():
    with open(f"{ROOT}/universe/manifest.txt") as f:
        names = [l.strip() for l in f if l.strip() and not l.startswith("#")]
    loaded = {n: simple_returns(f"{ROOT}/universe/{n}.csv") for n in names}
    as_of = max(d[-1] for d, _ in loaded.values())
    candidates, skipped = [], {}
    for name, (dates, rets) in loaded.items():
        if busdays_between(dates[-1], as_of) > 5:
            skipped[name] = "stale"
            continue
        if len(rets) + 1 < 756 or len(rets) < WINDOW + 1:
            skipped[name] = "insufficient_history"
            continue
        sample = rets[-WINDOW - 1:-1]
        sigma = sd(sample)
        if stats.shapiro(sample).pvalue < ALPHA:
            skipped[name] = "normality_rejected"
            continue
        band = K * sigma
        if abs(rets[-1]) > band:
            candidates.append((name, abs(rets[-1]) / band, rets[-1], band))
        else:
            skipped[name] = "not_triggered"
    candidates.sort(key=lambda c: -c[1])
    dump("screen_universe.json", {
        "as_of": as_of,
        "candidates": [{"ticker": c[0], "ratio": c[1], "today_return": c[2], "band": c[3]} for c in candidates],
        "skipped": skipped,
    })


def main():
    returns_golden()
    correlation()
    normal50()
    swilk_cases()
    analyze()
    backtest()
    screen()


if __name__ == "__main__":
    main()
