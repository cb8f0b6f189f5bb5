import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, beforeAll, describe, expect, test } from "vitest";

import { parseReportJson } from "../src/parse.js";
import { loadSpec, render } from "../src/render.js";

const FIXTURES = path.join(path.dirname(fileURLToPath(import.meta.url)), "fixtures");

let workDir: string;

beforeAll(() => {
  workDir = fs.mkdtempSync(path.join(os.tmpdir(), "figs-"));
});

afterAll(() => {
  fs.rmSync(workDir, { recursive: true, force: true });
});

let specCounter = 0;

function writeSpec(spec: Record<string, unknown>): string {
  const file = path.join(workDir, `spec-${specCounter++}.json`);
  fs.writeFileSync(file, JSON.stringify(spec), "utf8");
  return file;
}

function fx(name: string): string {
  return path.join(FIXTURES, name);
}

describe("tree-sketch", () => {
  test("cherry renders all four panels", () => {
    const out = render(
      writeSpec({
        kind: "tree-sketch",
        tree: fx("cherry.pt"),
        output: "cherry.svg",
        labels: { title: "a cherry and its encodings" },
      }),
    );
    const svg = fs.readFileSync(out, "utf8");
    expect(svg).toContain("<svg");
    expect(svg).toContain(">tree<");
    expect(svg).toContain("exploration walk V");
    expect(svg).toContain("height process H");
    expect(svg).toContain("contour function C");
    expect(svg).toContain("a cherry and its encodings");
  });

  test("sampled tree renders too", () => {
    const out = render(writeSpec({ kind: "tree-sketch", tree: fx("small-iic.pt"), output: "iic.svg" }));
    expect(fs.existsSync(out)).toBe(true);
  });

  test("same inputs give byte-identical output", () => {
    const spec = { kind: "tree-sketch", tree: fx("cherry.pt"), output: "det.svg" };
    const a = fs.readFileSync(render(writeSpec(spec)), "utf8");
    const b = fs.readFileSync(render(writeSpec(spec)), "utf8");
    expect(a).toBe(b);
  });
});

describe("paths", () => {
  test("encoding CSV and SDE path CSV overlay in one figure", () => {
    const out = render(
      writeSpec({
        kind: "paths",
        paths: [{ file: fx("cherry-contour.csv"), label: "contour" }, { file: fx("sde-path.csv") }],
        output: "paths.svg",
        labels: { x: "t" },
      }),
    );
    const svg = fs.readFileSync(out, "utf8");
    // contour is one series, the limit path contributes Y and min Y
    expect((svg.match(/<polyline/g) ?? []).length).toBe(3);
    expect(svg).toContain("sde-path Y");
    expect(svg).toContain("sde-path min Y");
  });
});

describe("envelope", () => {
  test("staircase renders right-continuous steps", () => {
    const out = render(
      writeSpec({ kind: "envelope", envelope: fx("envelope.csv"), output: "env.svg" }),
    );
    const svg = fs.readFileSync(out, "utf8");
    expect(svg).toContain("<polyline");
    expect(svg).toContain("L(t)");
  });
});

describe("ecdf-overlay on every compare report", () => {
  test("all five experiments render with KS annotations and zero schema errors", () => {
    const reportFile = fx(path.join("reports", "report.json"));
    const report = parseReportJson("report.json", fs.readFileSync(reportFile, "utf8"));
    expect(report.experiments.length).toBe(5);
    for (const entry of report.experiments) {
      const name = entry.experiment;
      const out = render(
        writeSpec({
          kind: "ecdf-overlay",
          samples: [
            { file: fx(path.join("reports", `${name}-discrete.csv`)), label: "discrete" },
            { file: fx(path.join("reports", `${name}-limit.csv`)), label: "limit" },
          ],
          report: reportFile,
          experiment: name,
          output: `${name}.svg`,
          labels: { title: name },
        }),
      );
      const svg = fs.readFileSync(out, "utf8");
      expect(svg).toContain(`KS = ${entry.ks_stat.toFixed(4)}`);
      expect(svg).toContain(entry.pass ? "pass" : "fail");
    }
  });

  test("unknown experiment name lists what the report has", () => {
    const spec = writeSpec({
      kind: "ecdf-overlay",
      samples: [{ file: fx(path.join("reports", "ipc-v-discrete.csv")) }, { file: fx(path.join("reports", "ipc-v-limit.csv")) }],
      report: fx(path.join("reports", "report.json")),
      experiment: "nope",
      output: "x.svg",
    });
    expect(() => render(spec)).toThrow(/no experiment "nope" in report \(has: .*ipc-v/);
  });
});

describe("spec validation", () => {
  test("unknown kind names the choices", () => {
    const spec = writeSpec({ kind: "pie", output: "x.svg" });
    expect(() => render(spec)).toThrow(/expected one of paths, ecdf-overlay, envelope, tree-sketch/);
  });

  test("missing output field", () => {
    const spec = writeSpec({ kind: "envelope", envelope: fx("envelope.csv") });
    expect(() => render(spec)).toThrow(/field "output"/);
  });

  test("missing input file names it", () => {
    const spec = writeSpec({ kind: "tree-sketch", tree: fx("ghost.pt"), output: "x.svg" });
    expect(() => render(spec)).toThrow(/ghost\.pt: input file not found/);
  });

  test("wrong schema inside an input names file and column", () => {
    const bad = path.join(workDir, "bad.csv");
    fs.writeFileSync(bad, "replica,value\n0,ok\n", "utf8");
    const spec = writeSpec({
      kind: "ecdf-overlay",
      samples: [{ file: bad }, { file: fx(path.join("reports", "ipc-v-limit.csv")) }],
      output: "x.svg",
    });
    expect(() => render(spec)).toThrow(/bad\.csv: line 2, column 2: expected a number/);
  });

  test("relative inputs resolve against the spec's directory", () => {
    fs.copyFileSync(fx("cherry.pt"), path.join(workDir, "local-cherry.pt"));
    const spec = writeSpec({ kind: "tree-sketch", tree: "local-cherry.pt", output: "local.svg" });
    const out = render(spec);
    expect(path.dirname(out)).toBe(workDir);
  });

  test("loadSpec keeps labels and kind-specific fields", () => {
    const spec = loadSpec(
      writeSpec({
        kind: "ecdf-overlay",
        samples: ["a.csv", { file: "b.csv", label: "B" }],
        output: "x.svg",
        labels: { title: "T", x: "X" },
      }),
    );
    expect(spec.kind).toBe("ecdf-overlay");
    expect(spec.samples).toEqual([{ file: "a.csv", label: undefined }, { file: "b.csv", label: "B" }]);
    expect(spec.labels).toEqual({ title: "T", x: "X" });
  });
});
