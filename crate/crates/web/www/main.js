// Build the bindings first:
//   cargo build -p smallstate-web --release --target wasm32-unknown-unknown
//   wasm-bindgen --target web --out-dir crates/web/www/pkg \
//       target/wasm32-unknown-unknown/release/smallstate_web.wasm
// then serve this directory with any static file server.
import init, { currentSlice, radialProfile, observables } from "./pkg/smallstate_web.js";

const $ = (id) => document.getElementById(id);
const status = (msg) => { $("status").textContent = msg || ""; };

const LABELS = {
  total_charge: "total charge (e)",
  mean_square_radius: "⟨x²⟩ (Compton radii²)",
  mu_total: "μ total (Bohr magnetons)",
  mu_spin: "μ spin (Bohr magnetons)",
  L_total: "L total (ħ/2)",
  L_spin: "L spin (ħ/2)",
  energy_total: "energy (mc²)",
  xQx: "⟨x·Q̂x⟩",
  xPx: "⟨x·P̂x⟩",
};

function width() { return Math.pow(10, parseFloat($("logn").value)); }

function drawSlice(data) {
  const c = $("slice"), g = c.getContext("2d");
  const size = c.width, h = data.half_extent, res = data.resolution;
  const px = (x) => (x + h) / (2 * h) * size;
  const py = (y) => (h - y) / (2 * h) * size;
  g.clearRect(0, 0, size, size);
  const cell = size / res;
  const rhoMax = Math.max(...data.rho_q.map(Math.abs)) || 1;
  for (let k = 0; k < data.x.length; k++) {
    const shade = Math.round(255 - 120 * Math.abs(data.rho_q[k]) / rhoMax);
    g.fillStyle = `rgb(${shade},${shade},255)`;
    g.fillRect(px(data.x[k]) - cell / 2, py(data.y[k]) - cell / 2, cell, cell);
  }
  g.strokeStyle = "#036";
  for (let k = 0; k < data.x.length; k++) {
    const jx = data.j_x[k], jy = data.j_y[k];
    const mag = Math.hypot(jx, jy);
    if (!(data.peak_current > 0) || mag < 0.05 * data.peak_current) continue;
    const len = 0.9 * cell * mag / data.peak_current;
    const ux = jx / mag, uy = -jy / mag;
    const x0 = px(data.x[k]), y0 = py(data.y[k]);
    const x2 = x0 + ux * len / 2, y2 = y0 + uy * len / 2;
    g.beginPath();
    g.moveTo(x0 - ux * len / 2, y0 - uy * len / 2);
    g.lineTo(x2, y2);
    g.lineTo(x2 - 0.3 * len * (ux + 0.5 * uy), y2 - 0.3 * len * (uy - 0.5 * ux));
    g.moveTo(x2, y2);
    g.lineTo(x2 - 0.3 * len * (ux - 0.5 * uy), y2 - 0.3 * len * (uy + 0.5 * ux));
    g.stroke();
  }
  g.save();
  g.setLineDash([6, 4]);
  g.strokeStyle = "#c00";
  g.beginPath();
  g.arc(px(0), py(0), data.compton_radius / (2 * h) * size, 0, 2 * Math.PI);
  g.stroke();
  g.restore();
  g.fillStyle = "#000";
  g.fillText(`n = ${data.n.toPrecision(3)}   peak |J| = ${data.peak_current.toExponential(3)}`, 8, 14);
}

function drawProfile(data) {
  const c = $("profile"), g = c.getContext("2d");
  const w = c.width, hgt = c.height, pad = 24;
  g.clearRect(0, 0, w, hgt);
  const all = data.a.concat(data.b);
  const lo = Math.min(0, ...all), hi = Math.max(...all);
  const rMax = data.r[data.r.length - 1];
  const X = (r) => pad + (w - 2 * pad) * r / rMax;
  const Y = (v) => hgt - pad - (hgt - 2 * pad) * (v - lo) / (hi - lo || 1);
  g.strokeStyle = "#999";
  g.beginPath(); g.moveTo(pad, Y(0)); g.lineTo(w - pad, Y(0)); g.stroke();
  for (const [key, color] of [["a", "#036"], ["b", "#c60"]]) {
    g.strokeStyle = color;
    g.beginPath();
    data.r.forEach((r, i) => (i ? g.lineTo(X(r), Y(data[key][i])) : g.moveTo(X(r), Y(data[key][i]))));
    g.stroke();
  }
  g.fillStyle = "#000";
  g.fillText(`r up to ${rMax.toFixed(2)} Compton radii`, pad, 14);
}

function refresh() {
  const n = width(), h = parseFloat($("extent").value), res = parseInt($("res").value, 10);
  $("nval").textContent = n.toPrecision(3);
  $("extval").textContent = h.toFixed(2);
  $("resval").textContent = `${res}×${res}`;
  try {
    drawSlice(JSON.parse(currentSlice(n, h, res)));
    drawProfile(JSON.parse(radialProfile(n, Math.max(2 * h, 3 / Math.max(n, 1)), 200)));
    status("");
  } catch (e) {
    status(e.message || String(e));
  }
}

function computeObservables() {
  const body = $("obs").querySelector("tbody");
  try {
    const v = JSON.parse(observables(width()));
    body.innerHTML = "";
    for (const key of v._order) {
      const tr = document.createElement("tr");
      tr.innerHTML = `<th>${LABELS[key] || key}</th><td>${v[key].toPrecision(6)}</td><td>± ${v[key + "_err"].toExponential(1)}</td>`;
      body.appendChild(tr);
    }
    status("");
  } catch (e) {
    status(e.message || String(e));
  }
}

await init();
for (const id of ["logn", "extent", "res"]) $(id).addEventListener("input", refresh);
$("compute").addEventListener("click", computeObservables);
refresh();
