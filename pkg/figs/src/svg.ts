/**
 * Tiny deterministic SVG builder.  No dependencies, no randomness, fixed
 * number formatting, so a figure is byte-identical across runs and machines.
 */

export const PALETTE = ["#1f6fb4", "#d1495b", "#2e8b57", "#8860b3", "#b07d2b"];

/** Pixel coordinates rounded to 2 decimals with trailing zeros stripped. */
export function px(x: number): string {
  const s = x.toFixed(2);
  return s.includes(".") ? s.replace(/0+$/, "").replace(/\.$/, "") : s;
}

/** Tick label: trims binary-float noise without losing real digits. */
export function tickLabel(x: number): string {
  if (x === 0) return "0";
  const a = Math.abs(x);
  if (a >= 1e4 || a < 1e-3) return x.toExponential(1).replace("e+", "e");
  return String(parseFloat(x.toPrecision(6)));
}

export function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface Scale {
  (x: number): number;
  domain: [number, number];
}

export function linear(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 === 0 ? 1 : d1 - d0;
  const f = ((x: number) => r0 + ((x - d0) / span) * (r1 - r0)) as Scale;
  f.domain = [d0, d1];
  return f;
}

/** Round tick positions covering [lo, hi], spacing 1/2/5 times a power of ten. */
export function ticks(lo: number, hi: number, count: number): number[] {
  if (!(hi > lo)) return [lo];
  const raw = (hi - lo) / Math.max(1, count);
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

export function polylinePoints(xs: number[], ys: number[]): string {
  const pts: string[] = [];
  for (let i = 0; i < xs.length; i++) pts.push(`${px(xs[i])},${px(ys[i])}`);
  return pts.join(" ");
}

export interface SeriesSpec {
  t: number[];
  v: number[];
  color: string;
  label?: string;
  /** Right-continuous steps instead of linear interpolation. */
  step?: boolean;
  markers?: boolean;
}

export interface ChartSpec {
  x: number;
  y: number;
  width: number;
  height: number;
  series: SeriesSpec[];
  title?: string;
  xLabel?: string;
  yLabel?: string;
  /** Extra text line drawn inside the plot area, top-left. */
  annotation?: string;
  /** Force the y domain to include these values (e.g. 0 for counts). */
  includeY?: number[];
}

function dataRange(series: SeriesSpec[], pick: (s: SeriesSpec) => number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    for (const x of pick(s)) {
      if (x < lo) lo = x;
      if (x > hi) hi = x;
    }
  }
  if (!(lo < hi)) {
    lo -= 0.5;
    hi += 0.5;
  }
  return [lo, hi];
}

/** Axes, frame, series, legend: one framed panel as an SVG fragment. */
export function lineChart(spec: ChartSpec): string {
  const margin = { left: 46, right: 10, top: spec.title ? 24 : 10, bottom: 34 };
  const plotW = spec.width - margin.left - margin.right;
  const plotH = spec.height - margin.top - margin.bottom;
  const x0 = spec.x + margin.left;
  const y0 = spec.y + margin.top;

  const [tLo, tHi] = dataRange(spec.series, (s) => s.t);
  let [vLo, vHi] = dataRange(spec.series, (s) => s.v);
  for (const v of spec.includeY ?? []) {
    vLo = Math.min(vLo, v);
    vHi = Math.max(vHi, v);
  }
  if (vLo === vHi) {
    vLo -= 0.5;
    vHi += 0.5;
  }
  const pad = 0.04 * (vHi - vLo);
  const sx = linear(tLo, tHi, x0, x0 + plotW);
  const sy = linear(vLo - pad, vHi + pad, y0 + plotH, y0);

  const parts: string[] = [];
  parts.push(`<rect x="${px(x0)}" y="${px(y0)}" width="${px(plotW)}" height="${px(plotH)}" fill="none" stroke="#444" stroke-width="1"/>`);

  for (const tv of ticks(tLo, tHi, 5)) {
    const tx = sx(tv);
    parts.push(`<line x1="${px(tx)}" y1="${px(y0 + plotH)}" x2="${px(tx)}" y2="${px(y0 + plotH + 4)}" stroke="#444"/>`);
    parts.push(`<text x="${px(tx)}" y="${px(y0 + plotH + 16)}" font-size="10" text-anchor="middle" fill="#333">${tickLabel(tv)}</text>`);
  }
  for (const tv of ticks(vLo, vHi, 5)) {
    const ty = sy(tv);
    parts.push(`<line x1="${px(x0 - 4)}" y1="${px(ty)}" x2="${px(x0)}" y2="${px(ty)}" stroke="#444"/>`);
    parts.push(`<text x="${px(x0 - 7)}" y="${px(ty + 3)}" font-size="10" text-anchor="end" fill="#333">${tickLabel(tv)}</text>`);
  }

  for (const s of spec.series) {
    let xs: number[] = [];
    let ys: number[] = [];
    if (s.step) {
      // right-continuous staircase: hold each value until the next time
      for (let i = 0; i < s.t.length; i++) {
        xs.push(s.t[i]);
        ys.push(s.v[i]);
        if (i + 1 < s.t.length) {
          xs.push(s.t[i + 1]);
          ys.push(s.v[i]);
        }
      }
    } else {
      xs = s.t;
      ys = s.v;
    }
    const pts = polylinePoints(xs.map(sx), ys.map(sy));
    parts.push(`<polyline points="${pts}" fill="none" stroke="${s.color}" stroke-width="1.3"/>`);
    if (s.markers) {
      for (let i = 0; i < s.t.length; i++) {
        parts.push(`<circle cx="${px(sx(s.t[i]))}" cy="${px(sy(s.v[i]))}" r="2.2" fill="${s.color}"/>`);
      }
    }
  }

  if (spec.title) {
    parts.push(`<text x="${px(x0 + plotW / 2)}" y="${px(spec.y + 14)}" font-size="12" text-anchor="middle" fill="#111">${escapeText(spec.title)}</text>`);
  }
  if (spec.xLabel) {
    parts.push(`<text x="${px(x0 + plotW / 2)}" y="${px(y0 + plotH + 30)}" font-size="11" text-anchor="middle" fill="#333">${escapeText(spec.xLabel)}</text>`);
  }
  if (spec.yLabel) {
    const lx = spec.x + 12;
    const ly = y0 + plotH / 2;
    parts.push(`<text x="${px(lx)}" y="${px(ly)}" font-size="11" text-anchor="middle" fill="#333" transform="rotate(-90 ${px(lx)} ${px(ly)})">${escapeText(spec.yLabel)}</text>`);
  }
  if (spec.annotation) {
    parts.push(`<text x="${px(x0 + 8)}" y="${px(y0 + 14)}" font-size="11" fill="#111">${escapeText(spec.annotation)}</text>`);
  }

  const withLabels = spec.series.filter((s) => s.label);
  if (withLabels.length > 0) {
    let ly = y0 + 14 + (spec.annotation ? 14 : 0);
    for (const s of withLabels) {
      const lx = x0 + plotW - 8;
      parts.push(`<line x1="${px(lx - 58)}" y1="${px(ly - 3)}" x2="${px(lx - 42)}" y2="${px(ly - 3)}" stroke="${s.color}" stroke-width="1.6"/>`);
      parts.push(`<text x="${px(lx - 38)}" y="${px(ly)}" font-size="10" fill="#333">${escapeText(s.label ?? "")}</text>`);
      ly += 13;
    }
  }

  return parts.join("\n");
}

export function svgDocument(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="sans-serif">\n` +
    `<rect width="${width}" height="${height}" fill="#ffffff"/>\n` +
    body +
    "\n</svg>\n"
  );
}
