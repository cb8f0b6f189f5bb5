#!/usr/bin/env node
/** Usage: percolimit-render <spec.json> [more specs...] */

import { SchemaError } from "./parse.js";
import { render } from "./render.js";

function main(argv: string[]): number {
  if (argv.length === 0) {
    process.stderr.write("usage: percolimit-render <spec.json> [more specs...]\n");
    return 2;
  }
  for (const specFile of argv) {
    try {
      const out = render(specFile);
      process.stdout.write(`${specFile} -> ${out}\n`);
    } catch (e) {
      if (e instanceof SchemaError) {
        process.stderr.write(`error: ${e.message}\n`);
        return 2;
      }
      process.stderr.write(`error: ${(e as Error).message}\n`);
      return 3;
    }
  }
  return 0;
}

process.exit(main(process.argv.slice(2)));
