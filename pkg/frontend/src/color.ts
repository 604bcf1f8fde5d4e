/** Color mapping for heatmaps: a viridis ramp with truncation at a
 * configurable ceiling, and exact zeros rendered white so structural
 * zeros stand out from merely-small values. */

const VIRIDIS: [number, number, number][] = [
  [68, 1, 84],
  [71, 44, 122],
  [59, 81, 139],
  [44, 113, 142],
  [33, 144, 141],
  [39, 173, 129],
  [92, 200, 99],
  [170, 220, 50],
  [253, 231, 37],
];

function lerp(a: number, b: number, t: number): number {
  return a + (b - a) * t;
}

/** Map t in [0, 1] onto the viridis ramp. */
export function viridis(t: number): string {
  const clamped = Math.min(Math.max(t, 0), 1);
  const pos = clamped * (VIRIDIS.length - 1);
  const i = Math.min(Math.floor(pos), VIRIDIS.length - 2);
  const frac = pos - i;
  const [r0, g0, b0] = VIRIDIS[i];
  const [r1, g1, b1] = VIRIDIS[i + 1];
  const r = Math.round(lerp(r0, r1, frac));
  const g = Math.round(lerp(g0, g1, frac));
  const b = Math.round(lerp(b0, b1, frac));
  return `rgb(${r},${g},${b})`;
}

/** Heatmap cell color: white for exact zeros, viridis of value/truncate
 * otherwise (values at or above the ceiling share the top color). */
export function heatColor(value: number, truncate: number): string {
  if (value === 0) return "#ffffff";
  return viridis(value / truncate);
}
