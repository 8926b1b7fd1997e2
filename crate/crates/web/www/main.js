// Generated by `wasm-bindgen --target web` into ./pkg (see README).
import init, { spectrum, budget, pumping } from "./pkg/fluxonium_web.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2"];

const $ = (id) => document.getElementById(id);
const value = (id) => Number($(id).value);

function niceTicks(lo, hi, n) {
  const span = hi - lo || 1;
  const step0 = Math.pow(10, Math.floor(Math.log10(span / n)));
  const step = [1, 2, 5, 10].map((m) => m * step0).find((s) => span / s <= n) || 10 * step0;
  const ticks = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + 1e-12 * span; t += step) ticks.push(Number(t.toPrecision(12)));
  return ticks;
}

// series: [{ label, x, y }]; null or non-finite y values leave gaps.
function plot(canvas, series, { xLabel, yLabel, logY = false, yMax = Infinity }) {
  const dpr = window.devicePixelRatio || 1;
  const w = canvas.clientWidth, h = canvas.clientHeight;
  canvas.width = w * dpr;
  canvas.height = h * dpr;
  const ctx = canvas.getContext("2d");
  ctx.scale(dpr, dpr);
  ctx.clearRect(0, 0, w, h);
  const m = { l: 64, r: 120, t: 12, b: 40 };
  const fy = (v) => (logY ? Math.log10(v) : v);
  const ok = (v) => v !== null && Number.isFinite(v) && (!logY || v > 0);

  let x0 = Infinity, x1 = -Infinity, y0 = Infinity, y1 = -Infinity;
  for (const s of series) {
    s.x.forEach((x, k) => {
      if (!ok(s.y[k])) return;
      x0 = Math.min(x0, x); x1 = Math.max(x1, x);
      y0 = Math.min(y0, fy(s.y[k])); y1 = Math.max(y1, fy(s.y[k]));
    });
  }
  if (!Number.isFinite(x0)) return;
  y1 = Math.min(y1, fy(yMax));
  if (logY) { y0 = Math.floor(y0); y1 = Math.ceil(y1); }
  if (y1 === y0) { y0 -= 0.5; y1 += 0.5; }
  const px = (x) => m.l + ((x - x0) / (x1 - x0 || 1)) * (w - m.l - m.r);
  const py = (y) => h - m.b - ((y - y0) / (y1 - y0)) * (h - m.t - m.b);

  ctx.strokeStyle = "#ddd";
  ctx.fillStyle = "#444";
  ctx.font = "11px system-ui";
  ctx.textAlign = "center";
  for (const t of niceTicks(x0, x1, 8)) {
    ctx.beginPath(); ctx.moveTo(px(t), m.t); ctx.lineTo(px(t), h - m.b); ctx.stroke();
    ctx.fillText(String(t), px(t), h - m.b + 14);
  }
  ctx.textAlign = "right";
  const yTicks = logY ? Array.from({ length: y1 - y0 + 1 }, (_, k) => y0 + k) : niceTicks(y0, y1, 6);
  for (const t of yTicks) {
    ctx.beginPath(); ctx.moveTo(m.l, py(t)); ctx.lineTo(w - m.r, py(t)); ctx.stroke();
    ctx.fillText(logY ? `1e${t}` : String(t), m.l - 6, py(t) + 4);
  }
  ctx.textAlign = "center";
  ctx.fillText(xLabel, (m.l + w - m.r) / 2, h - 6);
  ctx.save();
  ctx.translate(14, (m.t + h - m.b) / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(yLabel, 0, 0);
  ctx.restore();

  ctx.save();
  ctx.beginPath();
  ctx.rect(m.l, m.t, w - m.l - m.r, h - m.t - m.b);
  ctx.clip();
  series.forEach((s, i) => {
    ctx.strokeStyle = COLORS[i % COLORS.length];
    ctx.lineWidth = 1.6;
    ctx.setLineDash(s.dashed ? [5, 4] : []);
    ctx.beginPath();
    let pen = false;
    s.x.forEach((x, k) => {
      if (!ok(s.y[k])) { pen = false; return; }
      const X = px(x), Y = py(fy(s.y[k]));
      if (pen) ctx.lineTo(X, Y); else ctx.moveTo(X, Y);
      pen = true;
    });
    ctx.stroke();
  });
  ctx.restore();

  ctx.textAlign = "left";
  series.forEach((s, i) => {
    const y = m.t + 10 + 16 * i;
    ctx.fillStyle = COLORS[i % COLORS.length];
    ctx.fillRect(w - m.r + 10, y - 4, 14, 3);
    ctx.fillStyle = "#333";
    ctx.fillText(s.label, w - m.r + 30, y);
  });
}

function guarded(readoutId, f) {
  return () => {
    const out = $(readoutId);
    try {
      out.classList.remove("error");
      f(out);
    } catch (e) {
      out.classList.add("error");
      out.textContent = String(e.message || e);
    }
  };
}

function showValues(panel) {
  for (const input of document.querySelectorAll(`#${panel} input`)) {
    const o = input.parentElement.querySelector("output");
    if (o) o.textContent = input.value;
  }
}

const circuit = () => [value("s-ec"), value("s-el"), value("s-ej")];

const drawSpectrum = guarded("s-readout", (out) => {
  showValues("spectrum-panel");
  const s = JSON.parse(spectrum(...circuit(), 0, 1, 201, value("s-levels")));
  plot($("s-plot"), s.labels.map((label, t) => ({ label, x: s.flux, y: s.ghz[t] })), {
    xLabel: "external flux (Φ₀)",
    yLabel: "frequency (GHz)",
  });
  const mid = (s.flux.length - 1) / 2;
  out.textContent = "at the sweet spot: " + s.labels.map((l, t) => `${l} = ${s.ghz[t][mid].toFixed(4)} GHz`).join(", ");
});

const drawBudget = guarded("b-readout", (out) => {
  showValues("budget-panel");
  const xqp = Math.pow(10, value("b-xqp"));
  const b = JSON.parse(budget(...circuit(), value("b-tan") * 1e-6, xqp, value("b-temp"), 0.3, 0.7, 161));
  const key = $("b-transition").value;
  const c = b[key];
  plot(
    $("b-plot"),
    [
      { label: "total", x: b.flux, y: c.total },
      { label: "dielectric", x: b.flux, y: c.dielectric, dashed: true },
      { label: "qp junction", x: b.flux, y: c.qp_junction, dashed: true },
      { label: "qp array", x: b.flux, y: c.qp_array, dashed: true },
    ],
    // parity-protected channels reach astronomically long lifetimes near 0.5
    { xLabel: "external flux (Φ₀)", yLabel: "T1 (ms)", logY: true, yMax: 1e4 },
  );
  const mid = (b.flux.length - 1) / 2;
  const t = c.total[mid];
  out.textContent = `x_qp = ${xqp.toExponential(2)}; total T1 at the sweet spot: ${t === null ? "unbounded" : t.toPrecision(4) + " ms"}`;
});

const drawPump = guarded("p-readout", (out) => {
  showValues("pump-panel");
  const p = JSON.parse(pumping(value("p-t101"), value("p-p0"), value("p-t102"), Math.pow(10, value("p-omega")), 400));
  const ms = p.t_us.map((t) => t / 1000);
  plot(
    $("p-plot"),
    [
      { label: "p0", x: ms, y: p.p0 },
      { label: "p1", x: ms, y: p.p1 },
      { label: "p2", x: ms, y: p.p2 },
    ],
    { xLabel: "drive duration (ms)", yLabel: "population" },
  );
  const rec = p.t1_02_recovered_ms === null ? "unbounded" : `${p.t1_02_recovered_ms.toFixed(4)} ms`;
  out.textContent = `T_eff = ${p.t_eff_ms.toFixed(4)} ms, saturated p0 = ${p.p0_saturation.toFixed(4)}, T1^02 recovered from T_eff: ${rec}`;
});

await init();
for (const id of ["s-ec", "s-el", "s-ej"]) {
  $(id).addEventListener("input", () => { drawSpectrum(); drawBudget(); });
}
$("s-levels").addEventListener("input", drawSpectrum);
for (const id of ["b-tan", "b-xqp", "b-temp", "b-transition"]) $(id).addEventListener("input", drawBudget);
for (const id of ["p-t101", "p-p0", "p-t102", "p-omega"]) $(id).addEventListener("input", drawPump);
window.addEventListener("resize", () => { drawSpectrum(); drawBudget(); drawPump(); });
drawSpectrum();
drawBudget();
drawPump();
