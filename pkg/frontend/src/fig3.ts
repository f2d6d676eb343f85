/**
 * Renders a planar-rotor phase-space directory (fig3): per snapshot a
 * Wigner heatmap (diverging colors, symmetric about zero so coherence
 * fringes show as blue) paired with the momentum marginal and the
 * stationary overlay.
 */

import { readTable, tableExtrema } from "./csv.js";
import { diverging } from "./colormap.js";
import { Svg, linearScale, ticks } from "./svg.js";
import { VerifyReport } from "./verify.js";

export function renderFig3(dir: string, verify: VerifyReport): Record<string, string> {
  const times = readTable(dir, "snapshot_times.csv");
  verify.add("snapshot_times.csv", tableExtrema(times));
  const stationary = readTable(dir, "stationary_pm.csv");
  verify.add("stationary_pm.csv", tableExtrema(stationary));
  const series = readTable(dir, "observables.csv");
  verify.add("observables.csv", tableExtrema(series));

  const out: Record<string, string> = {};
  for (let k = 0; k < times.rows; k++) {
    const wig = readTable(dir, `wigner_t${k}.csv`);
    verify.add(`wigner_t${k}.csv`, tableExtrema(wig));
    const marginal = readTable(dir, `marginal_t${k}.csv`);
    verify.add(`marginal_t${k}.csv`, tableExtrema(marginal));

    const mValues = [...new Set(wig.data.m)].sort((a, b) => a - b);
    const aValues = [...new Set(wig.data.alpha)].sort((a, b) => a - b);
    const nm = mValues.length;
    const na = aValues.length;
    const w = wig.data.w;
    const wmax = Math.max(...w.map(Math.abs), 1e-300);

    const heatW = 430;
    const heatH = 430;
    const margW = 150;
    const margin = { left: 58, right: 18, top: 36, bottom: 46 };
    const width = margin.left + heatW + 24 + margW + margin.right;
    const height = margin.top + heatH + margin.bottom;
    const svg = new Svg(width, height, {
      figure: `fig3-snapshot-${k}`,
      colormap: "diverging blue-white-red",
      color_scale: `symmetric about 0, |w| <= ${wmax}`,
    });

    const sx = linearScale(0, na, margin.left, margin.left + heatW);
    const sy = linearScale(mValues[0], mValues[nm - 1], margin.top + heatH, margin.top);
    const cellH = heatH / nm;
    const cellW = heatW / na;
    // wigner_t*.csv is written m-major with alpha ascending
    for (let i = 0; i < w.length; i++) {
      const mi = Math.floor(i / na);
      const ai = i % na;
      svg.rect(
        sx(ai),
        sy(mValues[mi]) - cellH / 2,
        cellW + 0.05,
        cellH + 0.05,
        diverging(w[i], wmax),
      );
    }
    svg.text(margin.left + heatW / 2, margin.top - 12,
      `t = ${times.data.time[k]}`, 12, "middle");
    svg.text(margin.left + heatW / 2, height - 10, "alpha", 11, "middle");
    for (const tick of [0, Math.PI, 2 * Math.PI]) {
      const ai = (tick / (2 * Math.PI)) * na;
      svg.line(sx(ai), margin.top + heatH, sx(ai), margin.top + heatH + 4, "#000000");
      svg.text(sx(ai), margin.top + heatH + 16,
        tick === 0 ? "0" : tick === Math.PI ? "pi" : "2pi", 9, "middle");
    }
    for (const tick of ticks(mValues[0], mValues[nm - 1], 6)) {
      svg.text(margin.left - 6, sy(tick) + 3, String(tick), 9, "end");
      svg.line(margin.left - 4, sy(tick), margin.left, sy(tick), "#000000");
    }
    svg.text(16, margin.top + heatH / 2, "m", 11, "middle");

    // momentum marginal panel with the stationary overlay
    const mx0 = margin.left + heatW + 24;
    const pmax = Math.max(...marginal.data.p, ...stationary.data.p_stationary, 1e-300);
    const px = linearScale(0, 1.05 * pmax, mx0, mx0 + margW);
    for (let i = 0; i < marginal.rows; i++) {
      const y = sy(marginal.data.m[i]);
      svg.rect(mx0, y - 1.0, px(marginal.data.p[i]) - mx0, 2.0, "#4477aa");
    }
    svg.polyline(
      stationary.data.m.map((m, i): [number, number] =>
        [px(stationary.data.p_stationary[i]), sy(m)]),
      "#222222",
      1.2,
      "4 3",
    );
    svg.line(mx0, margin.top, mx0, margin.top + heatH, "#000000");
    svg.text(mx0 + margW / 2, height - 10, "p(m)", 11, "middle");

    out[`fig3_t${k}.svg`] = svg.render();
  }
  return out;
}
