/**
 * FigureSpec loading, validation, and dispatch to the figure builders.
 *
 * A spec is a small JSON object naming the kind, the input files, the output
 * SVG path, and optional axis labels:
 *
 *   { "kind": "tree-sketch", "tree": "cherry.pt", "output": "cherry.svg" }
 *   { "kind": "paths", "paths": [{"file": "path.csv", "label": "Y"}], "output": "p.svg" }
 *   { "kind": "ecdf-overlay", "samples": [{"file": "a.csv"}, {"file": "b.csv"}],
 *     "report": "report.json", "experiment": "ipc-v", "output": "e.svg" }
 *   { "kind": "envelope", "envelope": "envelope.csv", "output": "l.svg" }
 *
 * Input files are resolved relative to the spec file's directory.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { Labels, ecdfOverlay, envelopeFigure, pathsFigure, treeSketch } from "./figures.js";
import {
  SchemaError,
  parseAnyPathCsv,
  parseEnvelopeCsv,
  parseReportJson,
  parseSampleCsv,
  parseTree,
} from "./parse.js";

export const KINDS = ["paths", "ecdf-overlay", "envelope", "tree-sketch"] as const;
export type Kind = (typeof KINDS)[number];

export interface FileRef {
  file: string;
  label?: string;
}

export interface FigureSpec {
  kind: Kind;
  output: string;
  labels: Labels;
  tree?: string;
  paths?: FileRef[];
  samples?: FileRef[];
  report?: string;
  experiment?: string;
  envelope?: string;
}

function specError(specFile: string, detail: string): SchemaError {
  return new SchemaError(specFile, detail);
}

function asString(specFile: string, obj: Record<string, unknown>, field: string): string {
  const v = obj[field];
  if (typeof v !== "string" || v === "") {
    throw specError(specFile, `field ${JSON.stringify(field)}: expected a non-empty string, got ${JSON.stringify(v)}`);
  }
  return v;
}

function asFileRefs(specFile: string, raw: unknown, field: string): FileRef[] {
  if (!Array.isArray(raw) || raw.length === 0) {
    throw specError(specFile, `field ${JSON.stringify(field)}: expected a non-empty array of {file, label?}`);
  }
  return raw.map((entry, i) => {
    if (typeof entry === "string") return { file: entry };
    if (typeof entry === "object" && entry !== null && typeof (entry as Record<string, unknown>).file === "string") {
      const e = entry as Record<string, unknown>;
      return { file: e.file as string, label: typeof e.label === "string" ? e.label : undefined };
    }
    throw specError(specFile, `field ${JSON.stringify(field)}[${i}]: expected a file name or {file, label?}`);
  });
}

export function loadSpec(specFile: string): FigureSpec {
  let raw: unknown;
  try {
    raw = JSON.parse(fs.readFileSync(specFile, "utf8"));
  } catch (e) {
    if ((e as NodeJS.ErrnoException).code === "ENOENT") {
      throw specError(specFile, "file not found");
    }
    throw specError(specFile, `not valid JSON (${(e as Error).message})`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw specError(specFile, "expected a JSON object");
  }
  const obj = raw as Record<string, unknown>;
  const kind = asString(specFile, obj, "kind");
  if (!(KINDS as readonly string[]).includes(kind)) {
    throw specError(specFile, `field "kind": expected one of ${KINDS.join(", ")}, got ${JSON.stringify(kind)}`);
  }
  const output = asString(specFile, obj, "output");
  const labelsRaw = obj.labels;
  const labels: Labels = {};
  if (labelsRaw !== undefined) {
    if (typeof labelsRaw !== "object" || labelsRaw === null || Array.isArray(labelsRaw)) {
      throw specError(specFile, `field "labels": expected an object with title/x/y strings`);
    }
    for (const key of ["title", "x", "y"] as const) {
      const v = (labelsRaw as Record<string, unknown>)[key];
      if (v !== undefined) {
        if (typeof v !== "string") {
          throw specError(specFile, `field "labels.${key}": expected a string`);
        }
        labels[key] = v;
      }
    }
  }

  const spec: FigureSpec = { kind: kind as Kind, output, labels };
  if (kind === "tree-sketch") {
    spec.tree = asString(specFile, obj, "tree");
  } else if (kind === "paths") {
    spec.paths = asFileRefs(specFile, obj.paths, "paths");
  } else if (kind === "ecdf-overlay") {
    spec.samples = asFileRefs(specFile, obj.samples, "samples");
    if (obj.report !== undefined) {
      spec.report = asString(specFile, obj, "report");
      spec.experiment = asString(specFile, obj, "experiment");
    }
  } else {
    spec.envelope = asString(specFile, obj, "envelope");
  }
  return spec;
}

function readInput(baseDir: string, name: string): { resolved: string; text: string } {
  const resolved = path.resolve(baseDir, name);
  let text: string;
  try {
    text = fs.readFileSync(resolved, "utf8");
  } catch (e) {
    if ((e as NodeJS.ErrnoException).code === "ENOENT") {
      throw new SchemaError(name, "input file not found");
    }
    throw e;
  }
  return { resolved, text };
}

/** Build the figure for a validated spec; returns the SVG document string. */
export function buildFigure(spec: FigureSpec, baseDir: string): string {
  if (spec.kind === "tree-sketch") {
    const { text } = readInput(baseDir, spec.tree!);
    return treeSketch(parseTree(spec.tree!, text), spec.labels);
  }
  if (spec.kind === "paths") {
    const series: Array<{ label: string; series: { t: number[]; v: number[] } }> = [];
    for (const ref of spec.paths!) {
      const { text } = readInput(baseDir, ref.file);
      for (const part of parseAnyPathCsv(ref.file, text)) {
        const base = ref.label ?? path.basename(ref.file, ".csv");
        series.push({ label: part.label ? `${base} ${part.label}` : base, series: part.series });
      }
    }
    return pathsFigure(series, spec.labels);
  }
  if (spec.kind === "ecdf-overlay") {
    const samples = spec.samples!.map((ref) => {
      const { text } = readInput(baseDir, ref.file);
      return { label: ref.label ?? path.basename(ref.file, ".csv"), values: parseSampleCsv(ref.file, text) };
    });
    let annotation: string | undefined;
    if (spec.report !== undefined) {
      const { text } = readInput(baseDir, spec.report);
      const report = parseReportJson(spec.report, text);
      const entry = report.experiments.find((e) => e.experiment === spec.experiment);
      if (entry === undefined) {
        const known = report.experiments.map((e) => e.experiment).join(", ");
        throw new SchemaError(spec.report, `no experiment ${JSON.stringify(spec.experiment)} in report (has: ${known})`);
      }
      annotation = `KS = ${entry.ks_stat.toFixed(4)} (threshold ${entry.threshold}, n = ${entry.n_A}) ${entry.pass ? "pass" : "fail"}`;
    }
    return ecdfOverlay(samples, spec.labels, annotation);
  }
  const { text } = readInput(baseDir, spec.envelope!);
  return envelopeFigure(parseEnvelopeCsv(spec.envelope!, text), spec.labels);
}

/** Load, validate, build, and write: returns the output file path. */
export function render(specFile: string): string {
  const spec = loadSpec(specFile);
  const baseDir = path.dirname(path.resolve(specFile));
  const svg = buildFigure(spec, baseDir);
  const outPath = path.resolve(baseDir, spec.output);
  fs.writeFileSync(outPath, svg, "utf8");
  return outPath;
}
