/** Color scales: a diverging blue-white-red map (symmetric about zero, for
 * quasi-probability fields where negative values mark coherence) and a
 * sequential white-to-crimson map for densities. */

type Rgb = [number, number, number];

const DIVERGING_STOPS: Array<[number, Rgb]> = [
  [-1.0, [5, 48, 97]],
  [-0.5, [67, 147, 195]],
  [0.0, [255, 255, 255]],
  [0.5, [214, 96, 77]],
  [1.0, [103, 0, 31]],
];

const SEQUENTIAL_STOPS: Array<[number, Rgb]> = [
  [0.0, [255, 255, 255]],
  [0.35, [252, 187, 132]],
  [0.7, [227, 74, 51]],
  [1.0, [127, 0, 0]],
];

function hex2(v: number): string {
  return Math.max(0, Math.min(255, Math.round(v))).toString(16).padStart(2, "0");
}

function interpolate(stops: Array<[number, Rgb]>, t: number): string {
  const lo = stops[0][0];
  const hi = stops[stops.length - 1][0];
  const x = Math.max(lo, Math.min(hi, t));
  for (let i = 1; i < stops.length; i++) {
    const [t1, c1] = stops[i];
    const [t0, c0] = stops[i - 1];
    if (x <= t1) {
      const u = (x - t0) / (t1 - t0 || 1);
      return (
        "#" +
        hex2(c0[0] + u * (c1[0] - c0[0])) +
        hex2(c0[1] + u * (c1[1] - c0[1])) +
        hex2(c0[2] + u * (c1[2] - c0[2]))
      );
    }
  }
  return "#000000";
}

/** value in [-scale, scale] -> color, white at exactly zero. */
export function diverging(value: number, scale: number): string {
  return interpolate(DIVERGING_STOPS, scale > 0 ? value / scale : 0);
}

/** value in [0, scale] -> color. */
export function sequential(value: number, scale: number): string {
  return interpolate(SEQUENTIAL_STOPS, scale > 0 ? value / scale : 0);
}
