import init, { stratify, certificate, detrep } from "./pkg/szego_demo.js";

const $ = (id) => document.getElementById(id);
const out = $("out");

function show(text) {
  try {
    out.textContent = JSON.stringify(JSON.parse(text), (k, v) => (k === "heatmap" ? "[…]" : v), 2);
  } catch {
    out.textContent = text;
  }
}

function draw(grid) {
  const ctx = $("heat").getContext("2d");
  const n = grid.length;
  const flat = grid.flat();
  const lo = Math.min(...flat), hi = Math.max(...flat);
  const img = ctx.createImageData(n, n);
  grid.forEach((row, i) => row.forEach((v, j) => {
    const t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
    const o = 4 * (i * n + j);
    img.data[o] = 255 * t;
    img.data[o + 1] = 80 + 120 * (1 - Math.abs(2 * t - 1));
    img.data[o + 2] = 255 * (1 - t);
    img.data[o + 3] = 255;
  }));
  ctx.putImageData(img, 0, 0);
}

function run(f) {
  try {
    const text = f($("poly").value);
    const parsed = JSON.parse(text);
    if (parsed.heatmap) draw(parsed.heatmap);
    show(text);
  } catch (e) {
    show(String(e));
  }
}

await init();
$("poly").value = $("preset").value;
$("preset").onchange = () => { $("poly").value = $("preset").value; run(stratify); };
$("stratify").onclick = () => run(stratify);
$("certificate").onclick = () => run((p) => certificate(p, $("open").checked));
$("detrep").onclick = () => run(detrep);
run(stratify);
