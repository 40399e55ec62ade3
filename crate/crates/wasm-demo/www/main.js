import init, {
  fixture_names, normality_demo, band_demo, backtest_demo,
} from "./pkg/sigmarev_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const fmt = (x, d = 4) => (x === null || x === undefined ? "n/a" : Number(x).toFixed(d));

function frame(canvas, xs, ys) {
  const pad = 30;
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  const sx = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (canvas.width - 2 * pad);
  const sy = (y) => canvas.height - pad - ((y - y0) / (y1 - y0 || 1)) * (canvas.height - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, canvas.width - 2 * pad, canvas.height - 2 * pad);
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  ctx.fillText(fmt(y1, 3), 2, pad + 4);
  ctx.fillText(fmt(y0, 3), 2, canvas.height - pad);
  ctx.fillText(fmt(x0, 3), pad, canvas.height - 8);
  ctx.fillText(fmt(x1, 3), canvas.width - pad - 30, canvas.height - 8);
  return { ctx, sx, sy };
}

function histogram(canvas, bins, overlay) {
  const xs = bins.flatMap((b) => [b.center - b.width / 2, b.center + b.width / 2]);
  const ys = [0, ...bins.map((b) => b.density), ...(overlay ? overlay.map((p) => p[1]) : [])];
  const { ctx, sx, sy } = frame(canvas, xs, ys);
  ctx.fillStyle = "#8ab";
  for (const b of bins) {
    const lo = sx(b.center - b.width / 2);
    ctx.fillRect(lo, sy(b.density), sx(b.center + b.width / 2) - lo - 1, sy(0) - sy(b.density));
  }
  if (overlay) {
    ctx.strokeStyle = "#c33";
    ctx.beginPath();
    overlay.forEach(([x, y], i) => (i ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y))));
    ctx.stroke();
  }
}

function normalCurve(lo, hi, mean, sd) {
  const pts = [];
  for (let i = 0; i <= 100; i++) {
    const x = lo + ((hi - lo) * i) / 100;
    const z = (x - mean) / sd;
    pts.push([x, Math.exp(-0.5 * z * z) / (sd * Math.sqrt(2 * Math.PI))]);
  }
  return pts;
}

function qqPlot(canvas, qq) {
  const t = qq.points.map((p) => p.theoretical);
  const s = qq.points.map((p) => p.sample);
  const { ctx, sx, sy } = frame(canvas, t, s);
  ctx.strokeStyle = "#c33";
  ctx.beginPath();
  const lo = Math.min(...t), hi = Math.max(...t);
  const { slope, intercept } = qq.reference_line;
  ctx.moveTo(sx(lo), sy(intercept + slope * lo));
  ctx.lineTo(sx(hi), sy(intercept + slope * hi));
  ctx.stroke();
  ctx.fillStyle = "#246";
  qq.points.forEach((p) => ctx.fillRect(sx(p.theoretical) - 1.5, sy(p.sample) - 1.5, 3, 3));
}

function guard(out, f) {
  out.classList.remove("err");
  try {
    f();
  } catch (e) {
    out.classList.add("err");
    out.textContent = String(e);
  }
}

function runNormality() {
  const out = $("nd-out");
  guard(out, () => {
    const r = JSON.parse(normality_demo($("nd-source").value, num("nd-n"), num("nd-seed"), num("nd-alpha")));
    out.textContent =
      `n ${r.n}  mean ${fmt(r.mean)}  sd ${fmt(r.std_dev)}\n` +
      `W ${fmt(r.w, 6)}  p ${r.p_value.toExponential(3)}  ` +
      (r.reject_normality ? "normality rejected" : "normality not rejected");
    const first = r.histogram[0], last = r.histogram[r.histogram.length - 1];
    const lo = first.center - first.width / 2, hi = last.center + last.width / 2;
    histogram($("nd-hist"), r.histogram, normalCurve(lo, hi, r.mean, r.std_dev));
    qqPlot($("nd-qq"), r.qq);
  });
}

function runBands() {
  const out = $("bd-out");
  guard(out, () => {
    const k = num("bd-k");
    const r = JSON.parse(band_demo($("bd-ticker").value, num("bd-window"), k));
    out.textContent =
      `${r.ticker}: ${r.dates.length} days from ${r.dates[0]} to ${r.dates[r.dates.length - 1]}, ` +
      `${r.triggers.length} outside ±${k}σ (${fmt(100 * r.outside_fraction, 2)}%)`;
    const idx = r.returns.map((_, i) => i);
    const upper = r.sigma.map((s) => k * s);
    const { ctx, sx, sy } = frame($("bd-plot"), idx, [...r.returns, ...upper, ...upper.map((u) => -u)]);
    ctx.strokeStyle = "#9ab";
    ctx.beginPath();
    r.returns.forEach((y, i) => (i ? ctx.lineTo(sx(i), sy(y)) : ctx.moveTo(sx(i), sy(y))));
    ctx.stroke();
    ctx.strokeStyle = "#c33";
    for (const sign of [1, -1]) {
      ctx.beginPath();
      upper.forEach((u, i) => (i ? ctx.lineTo(sx(i), sy(sign * u)) : ctx.moveTo(sx(i), sy(sign * u))));
      ctx.stroke();
    }
    ctx.fillStyle = "#000";
    r.triggers.forEach((i) => ctx.fillRect(sx(i) - 1.5, sy(r.returns[i]) - 1.5, 3, 3));
  });
}

function runBacktest() {
  const out = $("bt-out");
  guard(out, () => {
    const picked = [...document.querySelectorAll("#bt-tickers input:checked")].map((c) => c.value);
    const r = JSON.parse(backtest_demo(picked.join(","), num("bt-window"), num("bt-k")));
    const rows = r.per_ticker.map(
      (t) => `  ${t.ticker.padEnd(6)} triggers ${String(t.n_triggers).padStart(4)}  p_positive ${fmt(t.p_positive, 3)}`,
    );
    out.textContent =
      `${r.n_triggers} triggers (${r.open_triggers} without a next day)\n` +
      `p_positive ${fmt(r.p_positive, 4)}  p_within_range ${fmt(r.p_within_range, 4)}  ` +
      `mean next return ${fmt(r.mean_next_return, 5)}\n` +
      rows.join("\n");
    const xs = r.next_returns;
    if (xs.length < 2) {
      $("bt-hist").getContext("2d").clearRect(0, 0, 900, 240);
      return;
    }
    const lo = Math.min(...xs), hi = Math.max(...xs);
    const nb = Math.max(5, Math.ceil(Math.log2(xs.length) + 1));
    const w = (hi - lo) / nb || 1;
    const counts = new Array(nb).fill(0);
    xs.forEach((x) => counts[Math.min(nb - 1, Math.floor((x - lo) / w))]++);
    histogram(
      $("bt-hist"),
      counts.map((c, i) => ({ center: lo + (i + 0.5) * w, width: w, density: c / (xs.length * w) })),
    );
  });
}

await init();
const names = JSON.parse(fixture_names());
for (const n of names) {
  $("bd-ticker").add(new Option(n, n));
  const label = document.createElement("label");
  label.innerHTML = `<input type="checkbox" value="${n}" checked> ${n}`;
  $("bt-tickers").append(label);
}
$("nd-run").onclick = runNormality;
$("bd-run").onclick = runBands;
$("bt-run").onclick = runBacktest;
runNormality();
runBands();
runBacktest();
