import init, { witness_summary, phase_fringe, witness_map } from "./pkg/ctxscope_web.js";

const MAP_RES = 151;
const HALF_PI = Math.PI / 2;
const $ = (id) => document.getElementById(id);

function anglesOf(a, b, c) {
  const n = Math.hypot(a, b, c);
  return { alpha: Math.acos(c / n), beta: Math.atan2(b, a) };
}

const presets = {
  Nf: anglesOf(1, 1, 1),
  Bf: anglesOf(2, 2, 3),
  V0: anglesOf(2, 2, 1),
};

function amplitudes() {
  const alpha = +$("alpha").value;
  const beta = +$("beta").value;
  const chi = +$("chi").value;
  const c = Math.cos(alpha);
  return new Float64Array([
    Math.sin(alpha) * Math.cos(beta), 0,
    Math.sin(alpha) * Math.sin(beta), 0,
    c * Math.cos(chi), c * Math.sin(chi),
  ]);
}

const fmt = (x, d = 4) => (x >= 0 ? "+" : "") + x.toFixed(d);
const triple = (p) => Array.from(p, (x) => x.toFixed(4)).join(", ");

function drawFringe(rows) {
  const cv = $("fringe");
  const g = cv.getContext("2d");
  const pad = 32;
  const w = cv.width - 2 * pad;
  const h = cv.height - 2 * pad;
  g.clearRect(0, 0, cv.width, cv.height);
  g.strokeStyle = "#999";
  g.strokeRect(pad, pad, w, h);
  g.fillStyle = "#555";
  g.font = "11px system-ui";
  g.fillText("0", pad - 4, cv.height - pad + 14);
  g.fillText("2π", pad + w - 8, cv.height - pad + 14);
  g.fillText("1", pad - 14, pad + 4);
  g.fillText("0", pad - 14, pad + h + 4);
  const n = rows.length / 4;
  const colors = ["#1f77b4", "#2ca02c", "#d62728"];
  for (let k = 0; k < 3; k++) {
    g.strokeStyle = colors[k];
    g.lineWidth = 2;
    g.beginPath();
    for (let i = 0; i < n; i++) {
      const x = pad + (rows[4 * i] / (2 * Math.PI)) * w;
      const y = pad + (1 - rows[4 * i + 1 + k]) * h;
      i === 0 ? g.moveTo(x, y) : g.lineTo(x, y);
    }
    g.stroke();
  }
}

let mapImage = null;

function renderMap() {
  const m = witness_map(MAP_RES);
  const n = MAP_RES * MAP_RES;
  const cv = document.createElement("canvas");
  cv.width = cv.height = MAP_RES;
  const g = cv.getContext("2d");
  const img = g.createImageData(MAP_RES, MAP_RES);
  for (let k = 0; k < n; k++) {
    const i = Math.floor(k / MAP_RES);
    const j = k % MAP_RES;
    const w = m[2 * k];
    const gain = m[2 * k + 1];
    let rgb;
    if (w > 0) {
      const t = Math.min(1, w / 0.2287);
      rgb = [255 - 63 * t, 160 - 103 * t, 150 - 107 * t];
    } else if (gain > 0) {
      rgb = [240, 178, 122];
    } else {
      rgb = [170, 183, 196];
    }
    // alpha grows downward, beta to the right
    const p = 4 * (i * MAP_RES + j);
    img.data.set([...rgb, 255], p);
  }
  g.putImageData(img, 0, 0);
  mapImage = cv;
  const [max, a, b] = m.slice(2 * n);
  $("map-info").textContent =
    `max witness ${max.toFixed(5)} at α = ${a.toFixed(3)}, β = ${b.toFixed(3)} (${MAP_RES}×${MAP_RES} grid)`;
  presets.max = { alpha: a, beta: b };
}

function drawMap() {
  const cv = $("map");
  const g = cv.getContext("2d");
  g.imageSmoothingEnabled = false;
  g.drawImage(mapImage, 0, 0, cv.width, cv.height);
  const x = (+$("beta").value / HALF_PI) * cv.width;
  const y = (+$("alpha").value / HALF_PI) * cv.height;
  g.strokeStyle = "#000";
  g.lineWidth = 2;
  g.beginPath();
  g.arc(x, y, 6, 0, 2 * Math.PI);
  g.stroke();
}

function update() {
  for (const id of ["alpha", "beta", "chi"]) {
    $(`${id}-out`).textContent = (+$(id).value).toFixed(3);
  }
  try {
    const amps = amplitudes();
    const s = JSON.parse(witness_summary(amps));
    $("witness").textContent = fmt(s.witness);
    $("witness-out").textContent = fmt(s.witness_from_outputs);
    $("gain").textContent = fmt(s.gain);
    $("paths").textContent = triple([s.p_f, s.p_d1, s.p_d2]);
    $("free").textContent = triple(s.free);
    $("blocked").textContent = `${triple(s.blocked)} (survival ${s.survival_blocked.toFixed(4)})`;
    drawFringe(phase_fringe(amps, 121));
    $("error").textContent = "";
  } catch (e) {
    $("error").textContent = String(e);
  }
  drawMap();
}

function setAngles({ alpha, beta }) {
  $("alpha").value = alpha;
  $("beta").value = beta;
  $("chi").value = 0;
  update();
}

await init();
renderMap();
for (const id of ["alpha", "beta", "chi"]) {
  $(id).addEventListener("input", update);
}
for (const btn of document.querySelectorAll("[data-preset]")) {
  btn.addEventListener("click", () => setAngles(presets[btn.dataset.preset]));
}
$("map").addEventListener("click", (ev) => {
  const r = ev.target.getBoundingClientRect();
  setAngles({
    alpha: ((ev.clientY - r.top) / r.height) * HALF_PI,
    beta: ((ev.clientX - r.left) / r.width) * HALF_PI,
  });
});
setAngles(presets.Nf);
