import { describe, expect, it } from "vitest";

import { diverging, sequential } from "../src/colormap.js";
import { MOLLWEIDE_HALF_HEIGHT, MOLLWEIDE_HALF_WIDTH, mollweide } from "../src/mollweide.js";

describe("mollweide", () => {
  it("maps the center and poles to the canonical points", () => {
    const center = mollweide(Math.PI / 2, Math.PI);
    expect(center.x).toBeCloseTo(0, 12);
    expect(center.y).toBeCloseTo(0, 12);
    expect(mollweide(0, 0).y).toBeCloseTo(MOLLWEIDE_HALF_HEIGHT, 9);
    expect(mollweide(Math.PI, 0).y).toBeCloseTo(-MOLLWEIDE_HALF_HEIGHT, 9);
  });

  it("stays inside the ellipse", () => {
    for (let i = 0; i <= 20; i++) {
      for (let j = 0; j < 20; j++) {
        const p = mollweide((Math.PI * i) / 20, (2 * Math.PI * j) / 20);
        const r =
          (p.x / MOLLWEIDE_HALF_WIDTH) ** 2 + (p.y / MOLLWEIDE_HALF_HEIGHT) ** 2;
        expect(r).toBeLessThanOrEqual(1 + 1e-9);
      }
    }
  });

  it("covers the full width along the equator", () => {
    expect(Math.abs(mollweide(Math.PI / 2, 0).x)).toBeCloseTo(MOLLWEIDE_HALF_WIDTH, 9);
  });
});

describe("colormaps", () => {
  it("diverging scale is white at zero and symmetric in hue", () => {
    expect(diverging(0, 1)).toBe("#ffffff");
    const pos = diverging(0.7, 1);
    const neg = diverging(-0.7, 1);
    expect(pos).not.toBe(neg);
    // red channel dominates for positive, blue for negative
    const chan = (hex: string, k: number) => parseInt(hex.slice(1 + 2 * k, 3 + 2 * k), 16);
    expect(chan(pos, 0)).toBeGreaterThan(chan(pos, 2));
    expect(chan(neg, 2)).toBeGreaterThan(chan(neg, 0));
  });

  it("clamps out-of-range values", () => {
    expect(diverging(5, 1)).toBe(diverging(1, 1));
    expect(sequential(-1, 1)).toBe(sequential(0, 1));
    expect(sequential(0, 0)).toBe("#ffffff");
  });
});
