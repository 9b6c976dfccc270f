import init, { trajectory_bloch, ensemble_vs_master, invariance_distances } from "./pkg/qtraj_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function params() {
  const dt = num("dt");
  const tFinal = num("tfinal");
  return {
    method: $("method").value,
    gamma: num("gamma"),
    rabi: num("rabi"),
    detuning: num("detuning"),
    dt,
    tFinal,
    seed: BigInt(Math.max(0, Math.floor(num("seed")))),
    // about 500 points per plot
    every: Math.max(1, Math.round(tFinal / dt / 500)),
  };
}

// rows: flat array with `width` values per row, column 0 is time
function plot(canvas, rows, width, series, yRange) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 30;
  ctx.clearRect(0, 0, w, h);
  const n = rows.length / width;
  const tMax = rows[(n - 1) * width] || 1;
  const [lo, hi] = yRange;
  const x = (t) => pad + (t / tMax) * (w - 2 * pad);
  const y = (v) => h - pad - ((v - lo) / (hi - lo)) * (h - 2 * pad);

  ctx.strokeStyle = "#bbb";
  ctx.beginPath();
  ctx.moveTo(pad, y(0)); ctx.lineTo(w - pad, y(0));
  ctx.moveTo(pad, pad); ctx.lineTo(pad, h - pad);
  ctx.stroke();
  ctx.fillStyle = "#666";
  ctx.fillText(String(hi), 2, pad);
  ctx.fillText(String(lo), 2, h - pad);
  ctx.fillText(`t = ${tMax}`, w - pad - 40, h - 8);

  for (const { col, color } of series) {
    ctx.strokeStyle = color;
    ctx.beginPath();
    for (let i = 0; i < n; i++) {
      const px = x(rows[i * width]), py = y(rows[i * width + col]);
      i === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
    }
    ctx.stroke();
  }
}

function guarded(fn) {
  return () => {
    $("status").textContent = "";
    try {
      fn();
    } catch (e) {
      $("status").textContent = String(e.message || e);
    }
  };
}

function runTrajectory() {
  const p = params();
  const rows = trajectory_bloch(p.method, p.gamma, p.rabi, p.detuning, p.dt, p.tFinal, p.every, p.seed);
  plot($("traj"), rows, 4, [
    { col: 1, color: "#c33" },
    { col: 2, color: "#393" },
    { col: 3, color: "#33c" },
  ], [-1, 1]);
}

function runEnsemble() {
  const p = params();
  const rows = ensemble_vs_master(p.method, p.gamma, p.rabi, p.detuning, num("ntraj"), p.dt, p.tFinal, p.every, p.seed);
  plot($("ens"), rows, 4, [
    { col: 1, color: "#33c" },
    { col: 2, color: "#000" },
    { col: 3, color: "#c80" },
  ], [-1, 1]);
}

function runInvariance() {
  const p = params();
  const method = p.method === "jump" ? "qsd" : p.method;
  const rows = invariance_distances(method, p.gamma, p.rabi, num("theta"), num("shre"), num("shim"), p.dt, p.tFinal, p.seed);
  plot($("inv"), rows, 2, [{ col: 1, color: "#33c" }], [0, 1]);
}

await init();
$("run-traj").onclick = guarded(runTrajectory);
$("run-ens").onclick = guarded(runEnsemble);
$("run-inv").onclick = guarded(runInvariance);
guarded(runTrajectory)();
