/** Figure renderers: entropy growth curves, variance curve, and the
 * truncated-scale |UU^T| heatmap, all from the experiment CSV schemas. */

import { Table, requireColumns } from "./csv.js";
import { heatColor, viridis } from "./color.js";
import { Frame, axes, document, fmt, polyline, text, xPix, yPix } from "./svg.js";

export type FigureKind = "entropy-curves" | "variance-curve" | "heatmap";

export interface FigureSpec {
  kind: FigureKind;
  input: Table;
  inputFile?: string;
  /** per-trial table for the single-realization overlay (entropy-curves) */
  input2?: Table;
  input2File?: string;
  /** color ceiling for heatmaps; must be > 0 */
  truncate?: number;
  /** overlay a sqrt-depth reference curve (entropy-curves) */
  sqrtRef?: boolean;
  xLabel?: string;
  yLabel?: string;
}

const WIDTH = 560;
const HEIGHT = 420;

function frame(xMin: number, xMax: number, yMin: number, yMax: number): Frame {
  return { width: WIDTH, height: HEIGHT, left: 62, right: 20, top: 16,
           bottom: 46, xMin, xMax, yMin, yMax };
}

function legendEntry(x: number, y: number, color: string, label: string,
                     dash = ""): string {
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<line x1="${fmt(x)}" y1="${fmt(y)}" x2="${fmt(x + 24)}" y2="${fmt(y)}" ` +
    `stroke="${color}" stroke-width="2"${dashAttr}/>\n` +
    text(x + 30, y + 4, label, "start", 11);
}

export function renderEntropyCurves(spec: FigureSpec): string {
  const [depth, mean] = requireColumns(spec.input, ["depth", "mean_s2"],
    spec.inputFile ?? "aggregate csv");
  const series: string[] = [];
  let yMax = Math.max(...mean);
  let single: { xs: number[]; ys: number[] } | undefined;
  if (spec.input2) {
    const [d2, trial, s2] = requireColumns(spec.input2, ["depth", "trial", "s2"],
      spec.input2File ?? "per-trial csv");
    const xs: number[] = [];
    const ys: number[] = [];
    for (let i = 0; i < d2.length; i++) {
      if (trial[i] === 0) {
        xs.push(d2[i]);
        ys.push(s2[i]);
      }
    }
    single = { xs, ys };
    yMax = Math.max(yMax, ...ys);
  }
  const f = frame(Math.min(...depth), Math.max(...depth), 0, yMax * 1.06);
  const body: string[] = [axes(f, spec.xLabel ?? "depth d", spec.yLabel ?? "S2 (nats)")];
  let legendY = f.top + 14;
  if (single) {
    body.push(polyline(f, single.xs, single.ys, "#e08214", 1.2));
    body.push(legendEntry(f.left + 12, legendY, "#e08214", "single realization"));
    legendY += 16;
  }
  body.push(polyline(f, depth, mean, "#2166ac", 2));
  body.push(legendEntry(f.left + 12, legendY, "#2166ac", "mean"));
  legendY += 16;
  if (spec.sqrtRef) {
    // sqrt(d) guide anchored to the mean at the first depth
    const c = mean[0] / Math.sqrt(depth[0]);
    const ref = depth.map((d) => c * Math.sqrt(d));
    body.push(polyline(f, depth, ref, "#555555", 1.2, "5,4"));
    body.push(legendEntry(f.left + 12, legendY, "#555555", "~ sqrt(d)", "5,4"));
  }
  series.push(body.join("\n"));
  return document(WIDTH, HEIGHT, series.join("\n"));
}

export function renderVarianceCurve(spec: FigureSpec): string {
  const [depth, variance] = requireColumns(spec.input, ["depth", "var_s2"],
    spec.inputFile ?? "aggregate csv");
  const f = frame(Math.min(...depth), Math.max(...depth), 0,
    Math.max(...variance) * 1.15);
  const body = [
    axes(f, spec.xLabel ?? "depth d", spec.yLabel ?? "Var S2"),
    polyline(f, depth, variance, "#2166ac", 2),
  ];
  return document(WIDTH, HEIGHT, body.join("\n"));
}

export function renderHeatmap(spec: FigureSpec): string {
  const truncate = spec.truncate ?? 0.5;
  if (!(truncate > 0)) {
    throw new Error(`truncate must be > 0 for heatmaps, got ${truncate}`);
  }
  const [xs, ys, vals] = requireColumns(spec.input, ["x", "y", "value"],
    spec.inputFile ?? "heatmap csv");
  const n = Math.max(...xs);
  const side = 360;
  const cell = side / n;
  const left = 62;
  const top = 16;
  const parts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    const px = left + (ys[i] - 1) * cell;
    const py = top + (xs[i] - 1) * cell;
    // pad cells slightly so adjacent rects tile without hairlines
    parts.push(`<rect x="${fmt(px)}" y="${fmt(py)}" width="${fmt(cell + 0.5)}" ` +
      `height="${fmt(cell + 0.5)}" fill="${heatColor(vals[i], truncate)}"/>`);
  }
  parts.push(`<rect x="${left}" y="${top}" width="${side}" height="${side}" ` +
    `fill="none" stroke="#000"/>`);
  parts.push(text(left + side / 2, top + side + 34, spec.xLabel ?? "column y"));
  parts.push(text(18, top + side / 2, spec.yLabel ?? "row x", "middle", 12,
    ` transform="rotate(-90 18 ${fmt(top + side / 2)})"`));
  // color bar
  const barX = left + side + 24;
  const steps = 64;
  for (let i = 0; i < steps; i++) {
    const v = 1 - (i + 1) / steps;
    parts.push(`<rect x="${barX}" y="${fmt(top + (i * side) / steps)}" width="16" ` +
      `height="${fmt(side / steps + 0.5)}" fill="${viridis(v)}"/>`);
  }
  parts.push(`<rect x="${barX}" y="${top}" width="16" height="${side}" fill="none" stroke="#000"/>`);
  parts.push(text(barX + 22, top + 10, `>= ${truncate}`, "start", 10));
  parts.push(text(barX + 22, top + side, "0", "start", 10));
  const width = barX + 80;
  return document(width, top + side + 50, parts.join("\n"));
}

export function render(spec: FigureSpec): string {
  switch (spec.kind) {
    case "entropy-curves":
      return renderEntropyCurves(spec);
    case "variance-curve":
      return renderVarianceCurve(spec);
    case "heatmap":
      return renderHeatmap(spec);
  }
}
