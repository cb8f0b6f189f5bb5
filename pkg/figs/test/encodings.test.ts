import * as fs from "node:fs";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, test } from "vitest";

import { childLists, contour, heights, lukaciewicz } from "../src/encodings.js";
import { parsePathCsv, parseTree } from "../src/parse.js";

const FIXTURES = path.join(path.dirname(fileURLToPath(import.meta.url)), "fixtures");

function loadTree(name: string) {
  return parseTree(name, fs.readFileSync(path.join(FIXTURES, name), "utf8"));
}

function loadPath(name: string) {
  return parsePathCsv(name, fs.readFileSync(path.join(FIXTURES, name), "utf8"));
}

const CHERRY = { counts: [2, 0, 0] };

describe("display encodings against the encode command's output", () => {
  test("cherry exploration walk", () => {
    expect(lukaciewicz(CHERRY)).toEqual(loadPath("cherry-lukaciewicz.csv").v);
  });

  test("cherry height process", () => {
    expect(heights(CHERRY)).toEqual(loadPath("cherry-height.csv").v);
  });

  test("cherry contour function", () => {
    expect(contour(CHERRY)).toEqual(loadPath("cherry-contour.csv").v);
  });

  test("sampled tree contour matches, grid and all", () => {
    const tree = loadTree("small-iic.pt");
    const ref = loadPath("small-iic-contour.csv");
    const c = contour(tree);
    expect(c).toEqual(ref.v);
    expect(c.map((_, i) => i)).toEqual(ref.t);
  });
});

describe("structural invariants", () => {
  test("child lists agree with counts and cover every non-root vertex", () => {
    const tree = loadTree("small-iic.pt");
    const children = childLists(tree);
    const seen = new Set<number>();
    children.forEach((kids, v) => {
      expect(kids.length).toBe(tree.counts[v]);
      for (const c of kids) {
        expect(c).toBeGreaterThan(v);
        seen.add(c);
      }
    });
    expect(seen.size).toBe(tree.counts.length - 1);
  });

  test("exploration walk ends at -1 and stays nonnegative before it", () => {
    const v = lukaciewicz(loadTree("small-iic.pt"));
    expect(v[v.length - 1]).toBe(-1);
    for (let i = 0; i < v.length - 1; i++) expect(v[i]).toBeGreaterThanOrEqual(0);
  });

  test("contour is a ±1 walk from 0 back to 0", () => {
    const c = contour(loadTree("small-iic.pt"));
    expect(c[0]).toBe(0);
    expect(c[c.length - 1]).toBe(0);
    for (let i = 1; i < c.length; i++) expect(Math.abs(c[i] - c[i - 1])).toBe(1);
  });

  test("contour length is twice the edge count plus one", () => {
    const tree = loadTree("small-iic.pt");
    expect(contour(tree).length).toBe(2 * (tree.counts.length - 1) + 1);
  });
});
