// Built by `wasm-pack build crates/web --target web --out-dir www/pkg`.
import init, { scenario_snapshot, daily_curve, voltage_curve } from "./pkg/gridstress_web.js";

const $ = (id) => document.getElementById(id);

function clock(slot) {
  const m = slot * 15;
  return `${String(Math.floor(m / 60)).padStart(2, "0")}:${String(m % 60).padStart(2, "0")}`;
}

function scenario() {
  return [Number($("pen").value), $("pv").checked, $("lm").checked];
}

function fail(el, e) {
  el.innerHTML = `<p class="err">${String(e)}</p>`;
}

function showSnapshot() {
  const out = $("snapshot");
  try {
    const s = JSON.parse(scenario_snapshot(...scenario(), Number($("slot").value)));
    const h = s.histogram;
    const rows = s.congested
      .map((b) => `<tr><td>${b.branch}</td><td>${b.kind}</td><td>${b.loading_percent.toFixed(1)}</td></tr>`)
      .join("");
    out.innerHTML = `
      <p>${s.converged ? "Converged" : "<span class=err>Diverged</span>"} in ${s.iterations} iterations.
         Grid import ${s.slack_kw.toFixed(0)} kW, losses ${s.losses_kw.toFixed(1)} kW,
         lowest voltage ${s.min_voltage_pu.toFixed(4)} pu.</p>
      <table><tr><th>loading</th><th>&lt;40%</th><th>40-80%</th><th>80-100%</th><th>100-150%</th><th>&gt;150%</th></tr>
      <tr><td>branches</td><td>${h.below_40}</td><td>${h.bin_40_80}</td><td>${h.bin_80_100}</td><td>${h.bin_100_150}</td><td>${h.bin_gt_150}</td></tr></table>
      ${rows ? `<table><tr><th>branch at or above 80%</th><th>kind</th><th>%</th></tr>${rows}</table>` : "<p>No branch at or above 80%.</p>"}`;
  } catch (e) {
    fail(out, e);
  }
}

function axes(ctx, w, h, pad) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, pad);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad, h - pad);
  ctx.stroke();
}

function line(ctx, pts, color) {
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.beginPath();
  pts.forEach(([x, y], i) => (i ? ctx.lineTo(x, y) : ctx.moveTo(x, y)));
  ctx.stroke();
  ctx.lineWidth = 1;
}

function showDay() {
  const c = $("day");
  const ctx = c.getContext("2d");
  const pad = 30;
  try {
    const pts = JSON.parse(daily_curve(...scenario()));
    axes(ctx, c.width, c.height, pad);
    const sx = (i) => pad + (i / 95) * (c.width - 2 * pad);
    const maxLoad = Math.max(150, ...pts.map((p) => p.max_loading_percent));
    const maxEv = Math.max(1, ...pts.map((p) => p.ev_served_kw));
    const sy = (v, top) => c.height - pad - (v / top) * (c.height - 2 * pad);
    ctx.strokeStyle = "#e99";
    ctx.setLineDash([4, 4]);
    line(ctx, [[pad, sy(100, maxLoad)], [c.width - pad, sy(100, maxLoad)]], "#e99");
    ctx.setLineDash([]);
    line(ctx, pts.map((p) => [sx(p.slot), sy(p.max_loading_percent, maxLoad)]), "#c22");
    line(ctx, pts.map((p) => [sx(p.slot), sy(p.ev_served_kw, maxEv)]), "#27c");
    ctx.fillStyle = "#444";
    ctx.fillText(`${maxLoad.toFixed(0)}%`, 2, pad);
    ctx.fillText("100%", 2, sy(100, maxLoad));
    [0, 24, 48, 72, 95].forEach((s) => ctx.fillText(clock(s), sx(s) - 14, c.height - 10));
    const worst = pts.reduce((a, b) => (b.overloaded > a.overloaded ? b : a));
    const diverged = pts.filter((p) => !p.converged).length;
    $("day-msg").textContent =
      `Peak EV power ${maxEv.toFixed(0)} kW; most overloaded slot ${clock(worst.slot)} with ${worst.overloaded} branches at or above 100%` +
      (diverged ? `; ${diverged} slots diverged.` : ".");
  } catch (e) {
    fail($("day-msg"), e);
  }
}

function showCurve() {
  const c = $("curve");
  const ctx = c.getContext("2d");
  const pad = 30;
  try {
    const pmax = Number($("pmax").value);
    const pts = JSON.parse(voltage_curve(Number($("r").value), Number($("x").value), Number($("pf").value), pmax, 200));
    axes(ctx, c.width, c.height, pad);
    const sx = (p) => pad + (p / pmax) * (c.width - 2 * pad);
    const sy = (v) => c.height - pad - v * (c.height - 2 * pad);
    line(ctx, pts.map((p) => [sx(p.load_pu), sy(p.voltage_pu)]), "#2a6");
    ctx.fillStyle = "#444";
    ctx.fillText("1.0 pu", 2, sy(1));
    ctx.fillText(`${pmax} pu`, c.width - pad - 20, c.height - 10);
    const last = pts[pts.length - 1];
    $("curve-msg").textContent =
      last.load_pu < pmax
        ? `No solution beyond ${last.load_pu.toFixed(3)} pu (voltage ${last.voltage_pu.toFixed(3)} pu): the line's transfer limit.`
        : `Voltage at ${pmax} pu load: ${last.voltage_pu.toFixed(4)} pu.`;
  } catch (e) {
    fail($("curve-msg"), e);
  }
}

await init();
$("slot").addEventListener("input", () => ($("clock").textContent = clock(Number($("slot").value))));
$("run-snapshot").addEventListener("click", showSnapshot);
$("run-day").addEventListener("click", showDay);
$("run-curve").addEventListener("click", showCurve);
showSnapshot();
