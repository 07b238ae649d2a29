import init, { failure_costs, load_curves, compare, topology_text } from "./pkg/wdmsim_wasm.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"];
const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

// series: [{ name, xs, ys }], null ys are drawn as gaps
function plot(canvas, series, xlabel, ylabel) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 45;
  ctx.clearRect(0, 0, w, h);
  const finite = series.flatMap((s) => s.ys.filter((y) => y !== null && isFinite(y)));
  const xs = series.flatMap((s) => s.xs);
  if (!finite.length) return;
  const x0 = Math.min(...xs), x1 = Math.max(...xs);
  const y0 = 0, y1 = Math.max(...finite) * 1.05 || 1;
  const px = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const py = (y) => h - pad - ((y - y0) / (y1 - y0)) * (h - 2 * pad);

  ctx.strokeStyle = "#888";
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.beginPath();
  ctx.moveTo(pad, pad / 2);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad / 2, h - pad);
  ctx.stroke();
  for (let i = 0; i <= 4; i++) {
    const y = y0 + ((y1 - y0) * i) / 4, x = x0 + ((x1 - x0) * i) / 4;
    ctx.fillText(y.toPrecision(3), 2, py(y) + 4);
    ctx.fillText(x.toPrecision(3), px(x) - 10, h - pad + 14);
  }
  ctx.fillText(xlabel, w / 2, h - 8);
  ctx.fillText(ylabel, pad + 4, pad / 2 - 4);

  series.forEach((s, k) => {
    ctx.strokeStyle = COLORS[k % COLORS.length];
    ctx.beginPath();
    let pen = false;
    s.xs.forEach((x, i) => {
      const y = s.ys[i];
      if (y === null || !isFinite(y)) {
        pen = false;
        return;
      }
      pen ? ctx.lineTo(px(x), py(y)) : ctx.moveTo(px(x), py(y));
      pen = true;
    });
    ctx.stroke();
    ctx.fillStyle = ctx.strokeStyle;
    ctx.fillText(s.name, w - pad - 120, pad / 2 + 12 * (k + 1));
  });
}

function guard(out, f) {
  try {
    f();
  } catch (e) {
    $(out).innerHTML = `<span class="err">${e.message ?? e}</span>`;
  }
}

function updateCosts() {
  guard("cost-out", () => {
    const c = JSON.parse(failure_costs(num("muf"), num("muh"), num("varf"), num("varh"), num("th")));
    const rs = c.points.map((p) => p.r);
    $("cost-out").textContent =
      `failure probability: exponential ${c.exponential.toFixed(5)}, Tchebycheff bound ${c.tchebycheff.toFixed(5)}`;
    plot($("cost-plot"), [
      { name: "exponential", xs: rs, ys: c.points.map((p) => p.exponential) },
      { name: "Tchebycheff", xs: rs, ys: c.points.map((p) => p.tchebycheff) },
    ], "repacking probability", "cost");
  });
}

function updateLoads() {
  guard("load-out", () => {
    const c = JSON.parse(load_curves(num("cap"), num("maxload"), 200));
    $("load-out").textContent = "";
    const series = [{ name: "Erlang-B", xs: c.loads, ys: c.blocking }];
    c.repacking.forEach((ys, i) => {
      // a crowded legend helps nobody
      if (c.repacking.length <= 6 || i === c.repacking.length - 1 || i % Math.ceil(c.repacking.length / 5) === 0) {
        series.push({ name: `repack x=${i + 1}`, xs: c.loads, ys });
      }
    });
    plot($("load-plot"), series, "offered load (Erlangs)", "probability");
  });
}

function runCompare() {
  $("cmp-out").textContent = "running...";
  // let the message paint before the simulation blocks the thread
  setTimeout(() => guard("cmp-out", () => {
    const t = performance.now();
    const rows = JSON.parse(compare(num("lam"), num("ratio"), num("req"), num("seed")));
    const ms = (performance.now() - t).toFixed(0);
    $("cmp-out").innerHTML =
      "<table><tr><th>algorithm</th><th>blocking</th><th>reconfiguration</th><th>accepted</th><th>rerouted</th><th>load/wavelength</th></tr>" +
      rows.map((r) => `<tr><td>${r.algorithm}</td><td>${r.blocking.toFixed(5)}</td><td>${r.reconfiguration.toFixed(5)}</td>` +
        `<td>${r.accepted}</td><td>${r.reconfig_events}</td><td>${r.load_per_wavelength.toFixed(4)}</td></tr>`).join("") +
      `</table><small>${ms} ms</small>`;
  }), 10);
}

await init();
$("topo").textContent = topology_text();
for (const id of ["muf", "varf", "muh", "varh", "th"]) $(id).addEventListener("input", updateCosts);
for (const id of ["cap", "maxload"]) $(id).addEventListener("input", updateLoads);
$("run").addEventListener("click", runCompare);
updateCosts();
updateLoads();
