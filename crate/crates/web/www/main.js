import init, { fd_heatmap, carrier_energy, cg_residuals } from "./pkg/zakotfs_web.js";

const PULSES = ["rrc", "gauss", "gauss-sinc", "sinc"];
const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function guard(fn) {
  return () => {
    $("error").textContent = "";
    try {
      fn();
    } catch (e) {
      $("error").textContent = String(e.message ?? e);
    }
  };
}

// dark blue at the floor, yellow at the peak
function colour(t) {
  const r = Math.round(255 * Math.min(1, Math.max(0, 1.8 * t - 0.5)));
  const g = Math.round(255 * Math.min(1, 1.2 * t));
  const b = Math.round(255 * Math.max(0, 0.6 - t));
  return [r, g, b];
}

function drawHeatmap() {
  const [m, n] = $("hm-grid").value.split("x").map(Number);
  const db = fd_heatmap(m, n, $("hm-pulse").value, num("hm-nu"), num("hm-seed"));
  const mn = m * n;
  const canvas = $("heatmap");
  canvas.width = mn;
  canvas.height = mn;
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(mn, mn);
  for (let i = 0; i < db.length; i++) {
    const [r, g, b] = colour(1 + db[i] / 60);
    img.data.set([r, g, b, 255], 4 * i);
  }
  ctx.putImageData(img, 0, 0);
  $("hm-info").textContent = `${mn} x ${mn}, colour scale 0 to -60 dB`;
}

// log-scale line plot of several series on one canvas
function plotLines(canvas, series, { logY = true, xLabel = "" } = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  const tf = (v) => (logY ? Math.log10(Math.max(v, 1e-300)) : v);
  let lo = Infinity, hi = -Infinity, len = 0;
  for (const s of series) {
    for (const v of s.data) {
      lo = Math.min(lo, tf(v));
      hi = Math.max(hi, tf(v));
    }
    len = Math.max(len, s.data.length);
  }
  if (hi - lo < 1e-9) { lo -= 0.5; hi += 0.5; }
  const x = (i) => pad + (i / Math.max(1, len - 1)) * (w - 2 * pad);
  const y = (v) => h - pad - ((tf(v) - lo) / (hi - lo)) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.fillText(logY ? `1e${hi.toFixed(1)}` : hi.toPrecision(3), 2, pad);
  ctx.fillText(logY ? `1e${lo.toFixed(1)}` : lo.toPrecision(3), 2, h - pad);
  ctx.fillText(xLabel, w / 2 - 20, h - 10);

  series.forEach((s, k) => {
    ctx.strokeStyle = s.colour;
    ctx.beginPath();
    s.data.forEach((v, i) => (i ? ctx.lineTo(x(i), y(v)) : ctx.moveTo(x(i), y(v))));
    ctx.stroke();
    ctx.fillStyle = s.colour;
    ctx.fillText(s.label, w - pad - 160, pad + 15 + 14 * k);
  });
}

function drawEnergies() {
  const e = carrier_energy($("en-pulse").value, num("en-nu"), num("en-seed"));
  const s = e.spreads;
  plotLines($("energies"), [
    { label: `pulsone (${s[0].toExponential(1)} dB)`, data: e.pulsone, colour: "#1a7" },
    { label: `FD carrier (${s[1].toFixed(1)} dB)`, data: e.dft, colour: "#c50" },
    { label: `CP-OFDM (${s[2].toFixed(1)} dB)`, data: e.cp_ofdm, colour: "#36c" },
  ], { xLabel: "carrier" });
  $("en-info").textContent = "max/min spread in brackets";
  e.free();
}

function drawResiduals() {
  const t = cg_residuals($("cg-pulse").value, 815, num("cg-snr"), num("cg-b"), num("cg-seed"));
  plotLines($("residual"), [{ label: "c_norm", data: t, colour: "#a3c" }], { xLabel: "iteration" });
  $("cg-info").textContent = `${t.length - 1} iterations, final ${t[t.length - 1].toExponential(2)}`;
}

await init();
for (const sel of document.querySelectorAll("select.pulse")) {
  for (const p of PULSES) sel.add(new Option(p, p));
}
$("hm-run").onclick = guard(drawHeatmap);
$("en-run").onclick = guard(drawEnergies);
$("cg-run").onclick = guard(drawResiduals);
guard(drawHeatmap)();
guard(drawEnergies)();
guard(drawResiduals)();
