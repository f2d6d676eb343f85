/** Mollweide projection of the sphere (equal-area), used for the
 * orientational-density insets. */

export interface XY {
  x: number;
  y: number;
}

/**
 * Project colatitude theta in [0, pi] and azimuth phi in [0, 2 pi) onto the
 * Mollweide ellipse with semi-axes (2 sqrt(2), sqrt(2)), centered at phi = pi.
 */
export function mollweide(theta: number, phi: number): XY {
  const lat = Math.PI / 2 - theta;
  let lon = phi - Math.PI;
  if (lon < -Math.PI) lon += 2 * Math.PI;
  if (lon > Math.PI) lon -= 2 * Math.PI;
  // solve 2 t + sin(2 t) = pi sin(lat) by Newton iteration
  let t = lat;
  if (Math.abs(Math.abs(lat) - Math.PI / 2) < 1e-9) {
    t = Math.sign(lat) * (Math.PI / 2);
  } else {
    for (let i = 0; i < 50; i++) {
      const f = 2 * t + Math.sin(2 * t) - Math.PI * Math.sin(lat);
      const df = 2 + 2 * Math.cos(2 * t);
      const step = f / (df || 1e-12);
      t -= step;
      if (Math.abs(step) < 1e-13) break;
    }
  }
  return {
    x: ((2 * Math.SQRT2) / Math.PI) * lon * Math.cos(t),
    y: Math.SQRT2 * Math.sin(t),
  };
}

export const MOLLWEIDE_HALF_WIDTH = 2 * Math.SQRT2;
export const MOLLWEIDE_HALF_HEIGHT = Math.SQRT2;
