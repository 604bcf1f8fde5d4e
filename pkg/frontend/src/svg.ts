/** Tiny deterministic SVG builder: fixed float formatting, no timestamps,
 * so identical inputs produce identical files. */

export function fmt(v: number): string {
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export interface Frame {
  width: number;
  height: number;
  left: number;
  right: number;
  top: number;
  bottom: number;
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
}

export function xPix(f: Frame, x: number): number {
  return f.left + ((x - f.xMin) / (f.xMax - f.xMin)) * (f.width - f.left - f.right);
}

export function yPix(f: Frame, y: number): number {
  return f.height - f.bottom - ((y - f.yMin) / (f.yMax - f.yMin)) * (f.height - f.top - f.bottom);
}

export function polyline(f: Frame, xs: number[], ys: number[], stroke: string,
                         width = 1.5, dash = ""): string {
  const pts = xs.map((x, i) => `${fmt(xPix(f, x))},${fmt(yPix(f, ys[i]))}`).join(" ");
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<polyline fill="none" stroke="${stroke}" stroke-width="${width}"${dashAttr} points="${pts}"/>`;
}

export function text(x: number, y: number, s: string, anchor = "middle",
                     size = 12, extra = ""): string {
  return `<text x="${fmt(x)}" y="${fmt(y)}" text-anchor="${anchor}" ` +
    `font-family="Helvetica, Arial, sans-serif" font-size="${size}"${extra}>${s}</text>`;
}

function niceTicks(lo: number, hi: number, count = 5): number[] {
  const span = hi - lo;
  if (span <= 0) return [lo];
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = span / (count * step);
  const mult = err >= 7.5 ? 10 : err >= 3 ? 5 : err >= 1.5 ? 2 : 1;
  const tick = mult * step;
  const start = Math.ceil(lo / tick) * tick;
  const ticks: number[] = [];
  for (let v = start; v <= hi + 1e-12; v += tick) {
    ticks.push(Math.abs(v) < tick * 1e-9 ? 0 : v);
  }
  return ticks;
}

function tickLabel(v: number): string {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 1000 || abs < 0.01) return v.toExponential(0);
  return parseFloat(v.toPrecision(3)).toString();
}

export function axes(f: Frame, xLabel: string, yLabel: string): string {
  const parts: string[] = [];
  const x0 = f.left;
  const x1 = f.width - f.right;
  const y0 = f.height - f.bottom;
  const y1 = f.top;
  parts.push(`<rect x="${fmt(x0)}" y="${fmt(y1)}" width="${fmt(x1 - x0)}" ` +
    `height="${fmt(y0 - y1)}" fill="none" stroke="#000" stroke-width="1"/>`);
  for (const tx of niceTicks(f.xMin, f.xMax)) {
    const px = xPix(f, tx);
    parts.push(`<line x1="${fmt(px)}" y1="${fmt(y0)}" x2="${fmt(px)}" y2="${fmt(y0 + 5)}" stroke="#000"/>`);
    parts.push(text(px, y0 + 18, tickLabel(tx)));
  }
  for (const ty of niceTicks(f.yMin, f.yMax)) {
    const py = yPix(f, ty);
    parts.push(`<line x1="${fmt(x0 - 5)}" y1="${fmt(py)}" x2="${fmt(x0)}" y2="${fmt(py)}" stroke="#000"/>`);
    parts.push(text(x0 - 8, py + 4, tickLabel(ty), "end"));
  }
  parts.push(text((x0 + x1) / 2, f.height - 8, xLabel));
  parts.push(text(14, (y0 + y1) / 2, yLabel, "middle", 12,
    ` transform="rotate(-90 14 ${fmt((y0 + y1) / 2)})"`));
  return parts.join("\n");
}

export function document(width: number, height: number, body: string): string {
  return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">\n<rect width="${width}" height="${height}" fill="#ffffff"/>\n` +
    body + "\n</svg>\n";
}
