#!/usr/bin/env python3
"""Regenerate the bundled price fixtures.

Everything is seeded; re-running reproduces the committed files exactly.
Run from the repository root: python3 tools/make_fixtures.py
"""
import os

import numpy as np
from scipy import stats

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")
HEADER = "Date,Open,High,Low,Close,Adj Close,Volume"


def business_days(start, count):
    days = []
    d = np.datetime64(start)
    while len(days) < count:
        if np.is_busday(d):
            days.append(str(d))
        d += 1
    return days


def bars_from_closes(rng, closes, adj_factor=1.0, base_volume=20_000_000):
    rows = []
    prev = closes[0]
    for i, c in enumerate(closes):
        c = round(c, 2)
        o = round(prev * (1 + rng.normal(0, 0.003)), 2) if i else c
        o = max(o, 0.01)
        hi = np.ceil(max(o, c) * (1 + abs(rng.normal(0, 0.006))) * 100) / 100
        lo = np.floor(min(o, c) * (1 - abs(rng.normal(0, 0.006))) * 100) / 100
        lo = max(lo, 0.01)
        adj = round(c * adj_factor, 6)
        vol = int(base_volume * np.exp(rng.normal(0, 0.3)))
        rows.append((o, hi, lo, c, adj, vol))
        prev = c
    return rows


def fmt_price(x):
    s = f"{x:.6f}".rstrip("0")
    if s.endswith("."):
        s += "0"
    return s


def write_csv(path, dates, rows, shuffle_rng=None):
    lines = []
    for d, (o, hi, lo, c, adj, vol) in zip(dates, rows):
        lines.append(f"{d},{o:.2f},{hi:.2f},{lo:.2f},{c:.2f},{fmt_price(adj)},{vol}")
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as f:
        f.write(HEADER + "\n" + "\n".join(lines) + "\n")


def closes_from_returns(start, rets):
    closes = [start]
    for r in rets:
        closes.append(round(closes[-1] * (1 + r), 2))
    return closes


def market_pair(rng):
    # AAPL-style stock and an index, 2012, correlated daily returns.
    n = 250
    idx_r = rng.normal(0.0004, 0.011, n - 1)
    idio = rng.normal(0.0, 0.013, n - 1)
    stock_r = 0.0008 + 1.05 * idx_r + idio
    dates = business_days("2012-01-03", n)
    aapl = bars_from_closes(rng, closes_from_returns(411.23, stock_r), 0.9413, 15_000_000)
    ixic = bars_from_closes(rng, closes_from_returns(2648.72, idx_r), 1.0, 1_800_000_000)
    write_csv(f"{ROOT}/prices/AAPL.csv", dates, aapl)
    write_csv(f"{ROOT}/prices/IXIC.csv", dates, ixic)


def historical(rng, name, start_price, vol, bounce):
    # 2007-01-03 .. 2012-11-30 style history: fat-tailed returns with a
    # small positive drift on the day after a large move.
    n = 1500
    dates = business_days("2007-01-03", n)
    rets = []
    hist = []
    for i in range(n - 1):
        r = vol * rng.standard_t(5) / np.sqrt(5 / 3)
        if len(hist) >= 252:
            sd = np.std(hist[-252:], ddof=1)
            if abs(hist[-1]) > 2 * sd:
                r = abs(r) * 0.5 + bounce * sd if rng.random() < 0.7 else r
        r = max(r, -0.4)
        rets.append(r)
        hist.append(r)
    closes = closes_from_returns(start_price, rets)
    bars = bars_from_closes(rng, closes, 1.0, 10_000_000)
    write_csv(f"{ROOT}/prices/{name}.csv", dates, bars)


def calm():
    n = 300
    dates = business_days("2012-01-03", n)
    closes = [100.0 if i % 2 == 0 else 101.0 for i in range(n)]
    rows = [(c, c + 0.5, c - 0.5, c, c, 1_000_000) for c in closes]
    write_csv(f"{ROOT}/prices/CALM.csv", dates, rows)


def window_ok(rets, window=252):
    sample = rets[-window - 1:-1]
    return stats.shapiro(sample).pvalue >= 0.05


def universe(rng):
    n = 800
    dates = business_days("2019-06-03", n)
    end = dates[-1]
    names = []

    def gaussian_path(last_sigmas, seed_rng):
        while True:
            rets = list(seed_rng.normal(0.0, 0.015, n - 1))
            if last_sigmas is not None:
                sd = np.std(rets[-253:-1], ddof=1)
                rets[-1] = last_sigmas * sd
            if window_ok(rets) and (last_sigmas is not None or abs(rets[-1]) < 2 * np.std(rets[-253:-1], ddof=1)):
                return rets

    specs = [
        ("BRKX", gaussian_path(3.4, rng)),
        ("DNVR", gaussian_path(-2.6, rng)),
        ("QUIT", gaussian_path(None, rng)),
    ]
    # Heavy skew in the trailing window: normality rejected, still breached.
    while True:
        rets = list(rng.normal(0.0, 0.015, n - 1))
        tail = rng.exponential(0.015, 252) - 0.015
        rets[-253:-1] = list(tail)
        rets[-1] = 4.0 * np.std(tail, ddof=1)
        if not window_ok(rets):
            break
    specs.append(("SKEW", rets))

    for name, rets in specs:
        closes = closes_from_returns(50.0, rets)
        write_csv(f"{ROOT}/universe/{name}.csv", dates, bars_from_closes(rng, closes))
        names.append(name)

    # Stale: history stops ten trading days before the others.
    rets = list(rng.normal(0.0, 0.015, n - 1))
    rets[-11] = 5.0 * np.std(rets[-263:-11], ddof=1)
    closes = closes_from_returns(30.0, rets)[: n - 10]
    write_csv(f"{ROOT}/universe/STAL.csv", dates[: n - 10], bars_from_closes(rng, closes))
    names.append("STAL")

    # Too short for the minimum history.
    short_dates = dates[-10:]
    closes = closes_from_returns(20.0, rng.normal(0, 0.02, 9))
    write_csv(f"{ROOT}/universe/TINY.csv", short_dates, bars_from_closes(rng, closes))
    names.append("TINY")

    with open(f"{ROOT}/universe/manifest.txt", "w") as f:
        f.write("# fixture universe\n")
        for name in ["SKEW", "QUIT", "BRKX", "TINY", "STAL", "DNVR"]:
            f.write(name + "\n")
    with open(f"{ROOT}/universe/comments_only.txt", "w") as f:
        f.write("# nothing to scan\n\n# still nothing\n")
    return end


def normal_sample(rng):
    xs = rng.standard_normal(50)
    with open(f"{ROOT}/oracle/normal50.txt", "w") as f:
        for x in xs:
            f.write(repr(float(x)) + "\n")


def main():
    rng = np.random.default_rng(20121201)
    market_pair(rng)
    historical(rng, "AAPLH", 83.80, 0.022, 0.6)
    historical(rng, "RIMMH", 138.0, 0.030, 0.5)
    historical(rng, "YHOOH", 26.0, 0.024, 0.7)
    calm()
    universe(rng)
    normal_sample(rng)


if __name__ == "__main__":
    main()
