/**
 * The four figure kinds, each a pure function from parsed inputs to an SVG
 * document string.
 */

import { childLists, contour, heights, lukaciewicz } from "./encodings.js";
import { Envelope, Series, Tree } from "./parse.js";
import { PALETTE, lineChart, linear, px, svgDocument, escapeText } from "./svg.js";

export interface Labels {
  title?: string;
  x?: string;
  y?: string;
}

// ---------------------------------------------------------------------------
// tree-sketch: the tree itself plus its three coding paths, four panels
// ---------------------------------------------------------------------------

/** Leaf-slot layout: leaves at consecutive x, parents centered over children. */
function treeLayout(tree: Tree): { xs: number[]; depth: number[] } {
  const children = childLists(tree);
  const depth = heights(tree);
  const xs = new Array<number>(tree.counts.length).fill(0);
  let slot = 0;
  // children precede the parent's x, so walk vertices in reverse depth-first
  // order (which visits every child before its parent is resolved)
  const order: number[] = [];
  const stack = [0];
  while (stack.length > 0) {
    const v = stack.pop()!;
    order.push(v);
    for (let i = children[v].length - 1; i >= 0; i--) stack.push(children[v][i]);
  }
  for (let i = order.length - 1; i >= 0; i--) {
    const v = order[i];
    if (children[v].length === 0) {
      xs[v] = slot++;
    } else {
      let s = 0;
      for (const c of children[v]) s += xs[c];
      xs[v] = s / children[v].length;
    }
  }
  return { xs, depth };
}

function treePanel(tree: Tree, x: number, y: number, width: number, height: number): string {
  const { xs, depth } = treeLayout(tree);
  const children = childLists(tree);
  const maxX = Math.max(...xs, 1e-9);
  const maxD = Math.max(...depth, 1);
  const margin = 24;
  const sx = linear(0, maxX, x + margin, x + width - margin);
  const sy = linear(0, maxD, y + height - margin, y + 24);
  const parts: string[] = [];
  parts.push(`<text x="${px(x + width / 2)}" y="${px(y + 14)}" font-size="12" text-anchor="middle" fill="#111">tree</text>`);
  for (let v = 0; v < tree.counts.length; v++) {
    for (const c of children[v]) {
      parts.push(`<line x1="${px(sx(xs[v]))}" y1="${px(sy(depth[v]))}" x2="${px(sx(xs[c]))}" y2="${px(sy(depth[c]))}" stroke="#555" stroke-width="1"/>`);
    }
  }
  for (let v = 0; v < tree.counts.length; v++) {
    parts.push(`<circle cx="${px(sx(xs[v]))}" cy="${px(sy(depth[v]))}" r="3" fill="${v === 0 ? "#d1495b" : "#1f6fb4"}"/>`);
  }
  return parts.join("\n");
}

export function treeSketch(tree: Tree, labels: Labels): string {
  const panelW = 240;
  const panelH = 200;
  const width = 4 * panelW + 20;
  const height = panelH + (labels.title ? 26 : 10);
  const top = labels.title ? 24 : 4;
  const parts: string[] = [];
  if (labels.title) {
    parts.push(`<text x="${px(width / 2)}" y="15" font-size="13" text-anchor="middle" fill="#111">${escapeText(labels.title)}</text>`);
  }
  parts.push(treePanel(tree, 10, top, panelW - 10, panelH - 10));

  const panels: Array<[string, number[]]> = [
    ["exploration walk V", lukaciewicz(tree)],
    ["height process H", heights(tree)],
    ["contour function C", contour(tree)],
  ];
  panels.forEach(([title, vals], i) => {
    parts.push(
      lineChart({
        x: 10 + (i + 1) * panelW,
        y: top,
        width: panelW - 10,
        height: panelH - 10,
        title,
        series: [{ t: vals.map((_, j) => j), v: vals, color: PALETTE[0], markers: vals.length <= 24 }],
        xLabel: labels.x,
        yLabel: labels.y,
        includeY: [0],
      }),
    );
  });
  return svgDocument(width, height, parts.join("\n"));
}

// ---------------------------------------------------------------------------
// paths: overlay of coding-path / SDE-path series
// ---------------------------------------------------------------------------

export function pathsFigure(series: Array<{ label: string; series: Series }>, labels: Labels): string {
  const width = 560;
  const height = 360;
  const body = lineChart({
    x: 0,
    y: 0,
    width,
    height,
    title: labels.title,
    xLabel: labels.x ?? "t",
    yLabel: labels.y,
    series: series.map((s, i) => ({
      t: s.series.t,
      v: s.series.v,
      color: PALETTE[i % PALETTE.length],
      label: s.label || undefined,
    })),
  });
  return svgDocument(width, height, body);
}

// ---------------------------------------------------------------------------
// ecdf-overlay: empirical CDFs of two or more sample sets, KS note optional
// ---------------------------------------------------------------------------

function ecdfSteps(values: number[]): Series {
  const xs = [...values].sort((a, b) => a - b);
  const n = xs.length;
  const t: number[] = [];
  const v: number[] = [];
  for (let i = 0; i < n; i++) {
    t.push(xs[i]);
    v.push(i / n);
    t.push(xs[i]);
    v.push((i + 1) / n);
  }
  return { t, v };
}

export function ecdfOverlay(
  samples: Array<{ label: string; values: number[] }>,
  labels: Labels,
  annotation?: string,
): string {
  const width = 560;
  const height = 360;
  const body = lineChart({
    x: 0,
    y: 0,
    width,
    height,
    title: labels.title,
    xLabel: labels.x ?? "value",
    yLabel: labels.y ?? "empirical CDF",
    annotation,
    series: samples.map((s, i) => {
      const e = ecdfSteps(s.values);
      return { t: e.t, v: e.v, color: PALETTE[i % PALETTE.length], label: s.label };
    }),
    includeY: [0, 1],
  });
  return svgDocument(width, height, body);
}

// ---------------------------------------------------------------------------
// envelope: right-continuous staircase of the lower-envelope record values
// ---------------------------------------------------------------------------

export function envelopeFigure(env: Envelope, labels: Labels): string {
  const width = 560;
  const height = 360;
  const t = [env.tMin, ...env.jumps.map((j) => j.t)];
  const v = [env.v0, ...env.jumps.map((j) => j.v)];
  const body = lineChart({
    x: 0,
    y: 0,
    width,
    height,
    title: labels.title,
    xLabel: labels.x ?? "t",
    yLabel: labels.y ?? "L(t)",
    series: [{ t, v, color: PALETTE[0], step: true, markers: t.length <= 40 }],
    includeY: [0],
  });
  return svgDocument(width, height, body);
}
