/**
 * The three coding paths of a plane tree, recomputed from child counts for
 * display.  Vertices are numbered in depth-first order; conventions match the
 * encode command's CSV outputs (the tests pin them against generated files).
 */

import { Tree } from "./parse.js";

/** Exploration walk: starts at 0, vertex i contributes a step of counts[i] - 1. */
export function lukaciewicz(tree: Tree): number[] {
  const v = [0];
  for (const c of tree.counts) v.push(v[v.length - 1] + c - 1);
  return v;
}

/** Depth of each vertex in depth-first order. */
export function heights(tree: Tree): number[] {
  const h = [0];
  const remaining = [tree.counts[0]];
  for (let i = 1; i < tree.counts.length; i++) {
    while (remaining[remaining.length - 1] === 0) remaining.pop();
    h.push(remaining.length);
    remaining[remaining.length - 1] -= 1;
    remaining.push(tree.counts[i]);
  }
  return h;
}

/** Children of each vertex, depth-first numbering. */
export function childLists(tree: Tree): number[][] {
  const children: number[][] = tree.counts.map(() => []);
  const stack: Array<{ v: number; left: number }> = [{ v: 0, left: tree.counts[0] }];
  for (let i = 1; i < tree.counts.length; i++) {
    while (stack[stack.length - 1].left === 0) stack.pop();
    const top = stack[stack.length - 1];
    children[top.v].push(i);
    top.left -= 1;
    stack.push({ v: i, left: tree.counts[i] });
  }
  return children;
}

/** Depth sequence of the walk around the tree, 2(n-1)+1 values. */
export function contour(tree: Tree): number[] {
  const children = childLists(tree);
  const seq = [0];
  const stack: Array<{ v: number; next: number }> = [{ v: 0, next: 0 }];
  while (stack.length > 0) {
    const top = stack[stack.length - 1];
    const kids = children[top.v];
    if (top.next < kids.length) {
      const child = kids[top.next];
      top.next += 1;
      stack.push({ v: child, next: 0 });
      seq.push(stack.length - 1);
    } else {
      stack.pop();
      if (stack.length > 0) seq.push(stack.length - 1);
    }
  }
  return seq;
}
