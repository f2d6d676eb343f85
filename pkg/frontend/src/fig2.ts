/**
 * Renders a linear-rotor thermalization directory (fig2):
 *   - histogram figure: one panel per snapshot with the level populations,
 *     the stationary weights and the Gibbs overlay, plus a Mollweide inset
 *     of the orientational density
 *   - series figure: energy, entropy and purity against time
 */

import { readTable, Table, tableExtrema } from "./csv.js";
import { sequential } from "./colormap.js";
import { mollweide, MOLLWEIDE_HALF_HEIGHT, MOLLWEIDE_HALF_WIDTH } from "./mollweide.js";
import { Svg, linearScale, ticks } from "./svg.js";
import { VerifyReport } from "./verify.js";

function snapshotCount(dir: string, verify: VerifyReport): number {
  const times = readTable(dir, "snapshot_times.csv");
  verify.add("snapshot_times.csv", tableExtrema(times));
  return times.rows;
}

function mollweideInset(
  svg: Svg,
  density: Table,
  cx: number,
  cy: number,
  halfWidth: number,
): void {
  const theta = density.data.theta;
  const phi = density.data.phi;
  const value = density.data.value;
  const thetas = [...new Set(theta)].sort((a, b) => a - b);
  const phis = [...new Set(phi)].sort((a, b) => a - b);
  const vmax = Math.max(...value, 1e-300);
  const scale = halfWidth / MOLLWEIDE_HALF_WIDTH;

  const edges = (nodes: number[], lo: number, hi: number) => {
    const e = [lo];
    for (let i = 1; i < nodes.length; i++) e.push(0.5 * (nodes[i - 1] + nodes[i]));
    e.push(hi);
    return e;
  };
  const thetaEdges = edges(thetas, 0, Math.PI);
  const dphi = phis.length > 1 ? phis[1] - phis[0] : 2 * Math.PI;

  const point = (th: number, ph: number): [number, number] => {
    const p = mollweide(th, ph);
    return [cx + p.x * scale, cy - p.y * scale];
  };
  for (let k = 0; k < value.length; k++) {
    const ti = thetas.indexOf(theta[k]);
    const color = sequential(value[k], vmax);
    const t0 = thetaEdges[ti];
    const t1 = thetaEdges[ti + 1];
    const p0 = phi[k] - dphi / 2;
    const p1 = phi[k] + dphi / 2;
    // edge cells would wrap across the +-pi seam of the projection
    if (p0 < 0 || p1 > 2 * Math.PI) continue;
    svg.polygon([point(t0, p0), point(t0, p1), point(t1, p1), point(t1, p0)], color);
  }
  // ellipse outline
  const outline: Array<[number, number]> = [];
  for (let i = 0; i <= 72; i++) {
    const a = (2 * Math.PI * i) / 72;
    outline.push([
      cx + halfWidth * Math.cos(a),
      cy - halfWidth * (MOLLWEIDE_HALF_HEIGHT / MOLLWEIDE_HALF_WIDTH) * Math.sin(a),
    ]);
  }
  svg.polyline(outline, "#555555", 0.8);
}

export function renderFig2(dir: string, verify: VerifyReport): Record<string, string> {
  const n = snapshotCount(dir, verify);
  const series = readTable(dir, "observables.csv");
  verify.add("observables.csv", tableExtrema(series));
  const stationary = readTable(dir, "stationary_pl.csv");
  verify.add("stationary_pl.csv", tableExtrema(stationary));

  const panels: Table[] = [];
  const densities: Table[] = [];
  for (let k = 0; k < n; k++) {
    const pop = readTable(dir, `populations_t${k}.csv`);
    verify.add(`populations_t${k}.csv`, tableExtrema(pop));
    panels.push(pop);
    const den = readTable(dir, `density_t${k}.csv`);
    verify.add(`density_t${k}.csv`, tableExtrema(den));
    densities.push(den);
  }
  const times = readTable(dir, "snapshot_times.csv");

  // --- histogram panels ----------------------------------------------------
  const panelW = 270;
  const panelH = 250;
  const margin = { left: 52, right: 12, top: 34, bottom: 40 };
  const width = n * panelW + margin.left + margin.right;
  const height = panelH + margin.top + margin.bottom;
  const pmax = Math.max(
    ...panels.flatMap((p) => p.data.p),
    ...stationary.data.p_stationary,
    ...stationary.data.p_gibbs,
  );
  const hist = new Svg(width, height, {
    figure: "fig2-histograms",
    colormap: "sequential white-to-crimson",
    density_scale: "per-panel maximum",
  });
  for (let k = 0; k < n; k++) {
    const x0 = margin.left + k * panelW;
    const levels = panels[k].data.l;
    const probs = panels[k].data.p;
    const sx = linearScale(-0.5, levels.length - 0.5, x0 + 8, x0 + panelW - 16);
    const sy = linearScale(0, 1.05 * pmax, margin.top + panelH, margin.top);
    for (let i = 0; i < levels.length; i++) {
      const xl = sx(levels[i] - 0.4);
      const xr = sx(levels[i] + 0.4);
      hist.rect(xl, sy(probs[i]), xr - xl, sy(0) - sy(probs[i]), "#4477aa");
    }
    // stationary weights as dashes, Gibbs overlay as a dashed line
    for (let i = 0; i < levels.length; i++) {
      const y = sy(stationary.data.p_stationary[i]);
      hist.line(sx(levels[i] - 0.45), y, sx(levels[i] + 0.45), y, "#222222", 1.6);
    }
    hist.polyline(
      stationary.data.l.map((l, i): [number, number] => [sx(l), sy(stationary.data.p_gibbs[i])]),
      "#bb5566",
      1.2,
      "4 3",
    );
    hist.line(sx(-0.5), sy(0), sx(levels.length - 0.5), sy(0), "#000000");
    hist.line(x0 + 8, margin.top, x0 + 8, sy(0), "#000000");
    hist.text(x0 + panelW / 2, margin.top - 14, `t = ${times.data.time[k]}`, 12, "middle");
    hist.text(x0 + panelW / 2, height - 8, "l", 11, "middle");
    for (const tick of ticks(0, levels.length - 1, 6)) {
      hist.text(sx(tick), sy(0) + 14, String(tick), 9, "middle");
    }
    mollweideInset(hist, densities[k], x0 + panelW - 66, margin.top + 42, 52);
  }
  for (const tick of ticks(0, pmax, 4)) {
    hist.text(margin.left + 2, linearScale(0, 1.05 * pmax, margin.top + panelH, margin.top)(tick) + 3,
      tick.toPrecision(2), 9, "end");
  }
  hist.text(14, margin.top + panelH / 2, "p_l", 11, "middle", ' transform="rotate(-90 14 ' +
    String(margin.top + panelH / 2) + ')"');

  // --- scalar series ---------------------------------------------------------
  const sw = 560;
  const sh = 300;
  const sm = { left: 56, right: 16, top: 20, bottom: 42 };
  const fig = new Svg(sw, sh, { figure: "fig2-series" });
  const t = series.data.time;
  const curves: Array<[string, number[], string, string]> = [
    ["energy", series.data.energy, "#222222", ""],
    ["entropy", series.data.entropy, "#4477aa", "6 3"],
    ["purity", series.data.purity, "#bb5566", "2 3"],
  ];
  const ymax = Math.max(...curves.flatMap(([, v]) => v));
  const sx = linearScale(t[0], t[t.length - 1], sm.left, sw - sm.right);
  const sy = linearScale(0, 1.05 * ymax, sh - sm.bottom, sm.top);
  fig.line(sm.left, sy(0), sw - sm.right, sy(0), "#000000");
  fig.line(sm.left, sm.top, sm.left, sy(0), "#000000");
  for (const tick of ticks(t[0], t[t.length - 1], 6)) {
    fig.text(sx(tick), sy(0) + 16, String(tick), 9, "middle");
    fig.line(sx(tick), sy(0), sx(tick), sy(0) + 4, "#000000");
  }
  for (const tick of ticks(0, ymax, 5)) {
    fig.text(sm.left - 6, sy(tick) + 3, tick.toPrecision(2), 9, "end");
    fig.line(sm.left - 4, sy(tick), sm.left, sy(tick), "#000000");
  }
  curves.forEach(([label, values, color, dash], idx) => {
    fig.polyline(t.map((tv, i): [number, number] => [sx(tv), sy(values[i])]), color, 1.6, dash);
    fig.text(sw - sm.right - 8, sm.top + 14 + 16 * idx, label, 11, "end", ` fill="${color}"`);
  });
  fig.text(sw / 2, sh - 8, "time (I/hbar)", 11, "middle");

  return {
    "fig2_histograms.svg": hist.render(),
    "fig2_series.svg": fig.render(),
  };
}
