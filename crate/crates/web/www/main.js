import init, { fixtureNames, spectrum, GridHeat, harmonicDisk } from "./pkg/graphcalc_web.js";

const $ = (id) => document.getElementById(id);

function fail(el, e) {
  el.textContent = String(e.message ?? e);
  el.classList.add("err");
}

// spectrum explorer

let view = null;

function drawEigenfunction() {
  const c = $("sp-canvas").getContext("2d");
  const { width: w, height: h } = c.canvas;
  c.clearRect(0, 0, w, h);
  if (!view) return;
  const j = Number($("sp-j").value);
  const f = view.functions[j];
  const m = Math.max(1e-12, ...f.map(Math.abs));
  const bw = w / f.length;
  c.strokeStyle = "#999";
  c.beginPath(); c.moveTo(0, h / 2); c.lineTo(w, h / 2); c.stroke();
  f.forEach((v, i) => {
    const y = (v / m) * (h / 2 - 20);
    c.fillStyle = view.interior.includes(view.vertices[i]) ? "#3366cc" : "#cc8833";
    c.fillRect(i * bw + 4, h / 2 - Math.max(y, 0), bw - 8, Math.abs(y));
    c.fillStyle = "#000";
    c.fillText(view.vertices[i], i * bw + 6, h - 4);
  });
  c.fillText(`λ${j + 1} = ${view.values[j].toFixed(6)}`, 6, 12);
}

function runSpectrum() {
  const out = $("sp-out");
  out.classList.remove("err");
  try {
    view = JSON.parse(spectrum($("sp-graph").value, $("sp-interior").value, $("sp-bc").value));
    out.textContent = "λ = " + view.values.map((x) => x.toFixed(6)).join(", ");
    $("sp-j").max = view.values.length - 1;
    $("sp-j").value = 0;
  } catch (e) {
    view = null;
    fail(out, e);
  }
  drawEigenfunction();
}

// heat on a grid

let heat = null;
let source = [4, 4];

function rebuildHeat() {
  const n = Number($("ht-n").value);
  source = source.map((s) => Math.min(s, n - 1));
  heat?.free();
  try {
    heat = new GridHeat(n, n, source[0], source[1], $("ht-dirichlet").checked);
  } catch (e) {
    heat = null;
    fail($("status"), e);
  }
  drawHeat();
}

function drawHeat() {
  const c = $("ht-canvas").getContext("2d");
  const { width: w } = c.canvas;
  c.clearRect(0, 0, w, w);
  if (!heat) return;
  const n = Number($("ht-n").value);
  const t = Number($("ht-t").value);
  $("ht-tval").textContent = t.toFixed(2);
  const u = heat.state(t);
  const top = Math.max(1e-12, ...u);
  const cell = w / n;
  for (let r = 0; r < n; r++) {
    for (let k = 0; k < n; k++) {
      const v = Math.max(0, u[r * n + k]) / top;
      c.fillStyle = `rgb(${Math.round(255 * Math.sqrt(v))}, ${Math.round(80 * v)}, ${Math.round(120 * (1 - v))})`;
      c.fillRect(k * cell, r * cell, cell - 1, cell - 1);
    }
  }
}

$("ht-canvas").addEventListener("click", (ev) => {
  const n = Number($("ht-n").value);
  const rect = ev.target.getBoundingClientRect();
  const k = Math.floor(((ev.clientX - rect.left) / rect.width) * n);
  const r = Math.floor(((ev.clientY - rect.top) / rect.height) * n);
  source = [r, k];
  rebuildHeat();
});

// harmonic map

function runHarmonic() {
  const out = $("hm-out");
  out.classList.remove("err");
  const c = $("hm-canvas").getContext("2d");
  const { width: w } = c.canvas;
  c.clearRect(0, 0, w, w);
  let m;
  try {
    m = JSON.parse(harmonicDisk(Number($("hm-n").value), Number($("hm-h").value), Number($("hm-turns").value)));
  } catch (e) {
    fail(out, e);
    return;
  }
  out.textContent = `energy ${m.energy.toFixed(8)} after ${m.steps} steps`;
  // orthographic view, tilted so both hemispheres show
  const tilt = 0.5;
  const proj = ([x, y, z]) => {
    const y2 = y * Math.cos(tilt) - z * Math.sin(tilt);
    const z2 = y * Math.sin(tilt) + z * Math.cos(tilt);
    return [w / 2 + x * (w / 2 - 20), w / 2 - z2 * (w / 2 - 20), y2];
  };
  c.strokeStyle = "#ccc";
  c.beginPath(); c.arc(w / 2, w / 2, w / 2 - 20, 0, 2 * Math.PI); c.stroke();
  const n = m.rows;
  const at = (r, k) => proj(m.points[r * n + k]);
  c.strokeStyle = "#3366cc";
  for (let r = 0; r < n; r++) {
    for (let k = 0; k < n; k++) {
      for (const [dr, dk] of [[0, 1], [1, 0]]) {
        if (r + dr >= n || k + dk >= n) continue;
        const [a, b] = [at(r, k), at(r + dr, k + dk)];
        c.globalAlpha = a[2] > 0 || b[2] > 0 ? 0.25 : 1;
        c.beginPath(); c.moveTo(a[0], a[1]); c.lineTo(b[0], b[1]); c.stroke();
      }
    }
  }
  c.globalAlpha = 1;
}

await init();
for (const name of JSON.parse(fixtureNames())) {
  $("sp-graph").add(new Option(name, name));
}
$("sp-run").addEventListener("click", runSpectrum);
$("sp-j").addEventListener("input", drawEigenfunction);
$("ht-n").addEventListener("change", rebuildHeat);
$("ht-dirichlet").addEventListener("change", rebuildHeat);
$("ht-t").addEventListener("input", drawHeat);
$("hm-run").addEventListener("click", runHarmonic);
$("status").textContent = "ready";
runSpectrum();
rebuildHeat();
runHarmonic();
