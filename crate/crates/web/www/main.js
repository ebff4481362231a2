import init, { phi_curve, residue_profile, spacing_profile } from "./pkg/palsqf_web.js";

function plot(canvas, ys, { bars = false, x0 = 0, x1 = ys.length } = {}) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 30;
  ctx.clearRect(0, 0, w, h);
  const max = Math.max(...ys, 0), min = Math.min(...ys, 0);
  const span = max - min || 1;
  const px = (i) => pad + (i / Math.max(ys.length - 1, 1)) * (w - 2 * pad);
  const py = (v) => h - pad - ((v - min) / span) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, py(0));
  ctx.lineTo(w - pad, py(0));
  ctx.stroke();
  ctx.fillStyle = "#333";
  ctx.font = "11px monospace";
  ctx.fillText(max.toPrecision(4), 2, pad - 8);
  ctx.fillText(String(x0), pad, h - 10);
  ctx.fillText(String(x1), w - pad - 30, h - 10);

  ctx.strokeStyle = ctx.fillStyle = "#2563eb";
  if (bars) {
    const bw = Math.max((w - 2 * pad) / ys.length, 1);
    ys.forEach((v, i) => ctx.fillRect(pad + i * bw, py(v), Math.max(bw - 1, 1), py(0) - py(v)));
  } else {
    ctx.beginPath();
    ys.forEach((v, i) => (i ? ctx.lineTo(px(i), py(v)) : ctx.moveTo(px(i), py(v))));
    ctx.stroke();
  }
}

function wire(id, run) {
  const form = document.getElementById(id);
  const status = document.getElementById(`${id}-status`);
  const canvas = document.getElementById(`${id}-canvas`);
  const go = (ev) => {
    ev?.preventDefault();
    const args = Object.fromEntries([...new FormData(form)].map(([k, v]) => [k, Number(v)]));
    const t = performance.now();
    try {
      status.textContent = run(args, canvas) + `  (${(performance.now() - t).toFixed(0)} ms)`;
      status.className = "status";
    } catch (e) {
      status.textContent = String(e.message ?? e);
      status.className = "status error";
    }
  };
  form.addEventListener("submit", go);
  go();
}

await init();

wire("phi", ({ base, n, points }, canvas) => {
  const ys = Array.from(phi_curve(base, n, points));
  plot(canvas, ys, { x0: 0, x1: 1 });
  return `max ${Math.max(...ys).toPrecision(6)}, mean ${(ys.reduce((a, b) => a + b, 0) / ys.length).toPrecision(6)}`;
});

wire("residue", ({ base, l, q }, canvas) => {
  const ys = Array.from(residue_profile(base, l, q));
  plot(canvas, ys, { bars: true, x1: q - 1 });
  const total = ys.reduce((a, b) => a + b, 0);
  const max = Math.max(...ys);
  return `${total} palindromes coprime to the base, largest class ${max} (${(max / (total / q)).toFixed(3)} x average)`;
});

wire("spacing", ({ d, q, n }, canvas) => {
  const ys = Array.from(spacing_profile(d, q, n));
  plot(canvas, ys, { x0: 1, x1: n });
  return `sup / Delta peaks at ${Math.max(...ys).toPrecision(4)}`;
});
