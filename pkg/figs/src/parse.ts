/**
 * Parsers for the simulation CLI's file formats.
 *
 * Every reader takes the file name alongside the text purely for error
 * reporting: a schema mismatch throws SchemaError whose message names the
 * file and, where it makes sense, the line and column of the offending cell.
 */

export class SchemaError extends Error {
  file: string;

  constructor(file: string, detail: string) {
    super(`${file}: ${detail}`);
    this.name = "SchemaError";
    this.file = file;
  }
}

function parseCell(file: string, line: number, column: number, raw: string): number {
  const x = Number(raw);
  if (raw.trim() === "" || !Number.isFinite(x)) {
    throw new SchemaError(file, `line ${line}, column ${column}: expected a number, got ${JSON.stringify(raw)}`);
  }
  return x;
}

/** Split CSV text into trimmed non-empty lines, remembering 1-based line numbers. */
function csvLines(text: string): Array<[number, string]> {
  const out: Array<[number, string]> = [];
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const s = lines[i].trim();
    if (s !== "") out.push([i + 1, s]);
  }
  return out;
}

/** Numeric CSV with one exact header row and a fixed column count. */
function numericCsv(file: string, text: string, header: string, nCols: number): number[][] {
  const lines = csvLines(text);
  if (lines.length === 0 || lines[0][1] !== header) {
    const got = lines.length === 0 ? "(empty file)" : JSON.stringify(lines[0][1]);
    throw new SchemaError(file, `line 1: expected header ${JSON.stringify(header)}, got ${got}`);
  }
  const rows: number[][] = [];
  for (const [lineno, s] of lines.slice(1)) {
    const cells = s.split(",");
    if (cells.length !== nCols) {
      throw new SchemaError(file, `line ${lineno}: expected ${nCols} columns, got ${cells.length}`);
    }
    rows.push(cells.map((c, j) => parseCell(file, lineno, j + 1, c)));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// tree files ("pt1 <n>" header, one row of child counts in depth-first order)
// ---------------------------------------------------------------------------

export interface Tree {
  /** Child count of each vertex, depth-first order, root first. */
  counts: number[];
}

export function parseTree(file: string, text: string): Tree {
  const lines = text.split("\n");
  const header = (lines[0] ?? "").split(" ");
  if (header.length !== 2 || header[0] !== "pt1") {
    throw new SchemaError(file, `line 1: expected 'pt1 <n_vertices>' header, got ${JSON.stringify(lines[0] ?? "")}`);
  }
  const n = Number(header[1]);
  if (!Number.isInteger(n) || n <= 0) {
    throw new SchemaError(file, `line 1, column 2: vertex count ${JSON.stringify(header[1])} is not a positive integer`);
  }
  const tokens = (lines[1] ?? "").split(/\s+/).filter((t) => t !== "");
  if (tokens.length !== n) {
    throw new SchemaError(file, `line 2: expected ${n} child counts, got ${tokens.length}`);
  }
  const counts = tokens.map((t, j) => {
    const c = Number(t);
    if (!Number.isInteger(c) || c < 0) {
      throw new SchemaError(file, `line 2, column ${j + 1}: child count ${JSON.stringify(t)} is not a nonnegative integer`);
    }
    return c;
  });
  // The depth-first walk must stay inside the tree: the running count of
  // unfilled child slots hits zero exactly once, after the last vertex.
  let open = 1;
  for (let i = 0; i < n; i++) {
    if (open <= 0) {
      throw new SchemaError(file, `line 2, column ${i + 1}: child counts close the tree before vertex ${i}`);
    }
    open += counts[i] - 1;
  }
  if (open !== 0) {
    throw new SchemaError(file, `line 2: child counts leave ${open} unfilled slots after the last vertex`);
  }
  return { counts };
}

// ---------------------------------------------------------------------------
// path CSVs
// ---------------------------------------------------------------------------

export interface Series {
  t: number[];
  v: number[];
}

/** "t,value" rows, the encoding CSVs written by the simulate/encode commands. */
export function parsePathCsv(file: string, text: string): Series {
  const rows = numericCsv(file, text, "t,value", 2);
  if (rows.length === 0) throw new SchemaError(file, "no data rows");
  return { t: rows.map((r) => r[0]), v: rows.map((r) => r[1]) };
}

/** "t,Y,Ymin" rows, the SDE solver's path output. */
export function parseLimitPathCsv(file: string, text: string): { t: number[]; y: number[]; ymin: number[] } {
  const rows = numericCsv(file, text, "t,Y,Ymin", 3);
  if (rows.length === 0) throw new SchemaError(file, "no data rows");
  return { t: rows.map((r) => r[0]), y: rows.map((r) => r[1]), ymin: rows.map((r) => r[2]) };
}

/** Either path flavour, sniffed by header, as one or two labelled series. */
export function parseAnyPathCsv(file: string, text: string): Array<{ label: string; series: Series }> {
  const first = csvLines(text)[0];
  if (first !== undefined && first[1] === "t,Y,Ymin") {
    const p = parseLimitPathCsv(file, text);
    return [
      { label: "Y", series: { t: p.t, v: p.y } },
      { label: "min Y", series: { t: p.t, v: p.ymin } },
    ];
  }
  return [{ label: "", series: parsePathCsv(file, text) }];
}

// ---------------------------------------------------------------------------
// sample CSVs ("replica,value")
// ---------------------------------------------------------------------------

export function parseSampleCsv(file: string, text: string): number[] {
  const rows = numericCsv(file, text, "replica,value", 2);
  if (rows.length === 0) throw new SchemaError(file, "no data rows");
  return rows.map((r) => r[1]);
}

// ---------------------------------------------------------------------------
// envelope CSVs (two sections: the initial value at t_min, then the jumps)
// ---------------------------------------------------------------------------

export interface Envelope {
  tMin: number;
  v0: number;
  jumps: Array<{ t: number; v: number }>;
}

export function parseEnvelopeCsv(file: string, text: string): Envelope {
  const lines = csvLines(text);
  if (lines.length < 3 || lines[0][1] !== "t_min,initial_value" || lines[2][1] !== "t_jump,value") {
    throw new SchemaError(file, "not an envelope CSV (expected 't_min,initial_value' and 't_jump,value' section headers)");
  }
  const head = lines[1][1].split(",");
  if (head.length !== 2) {
    throw new SchemaError(file, `line ${lines[1][0]}: expected 2 columns, got ${head.length}`);
  }
  const tMin = parseCell(file, lines[1][0], 1, head[0]);
  const v0 = parseCell(file, lines[1][0], 2, head[1]);
  const jumps: Array<{ t: number; v: number }> = [];
  for (const [lineno, s] of lines.slice(3)) {
    const cells = s.split(",");
    if (cells.length !== 2) {
      throw new SchemaError(file, `line ${lineno}: expected 2 columns, got ${cells.length}`);
    }
    jumps.push({ t: parseCell(file, lineno, 1, cells[0]), v: parseCell(file, lineno, 2, cells[1]) });
  }
  return { tMin, v0, jumps };
}

// ---------------------------------------------------------------------------
// compare reports
// ---------------------------------------------------------------------------

export interface ExperimentReport {
  experiment: string;
  ks_stat: number;
  threshold: number;
  p_value: number;
  n_A: number;
  n_B: number;
  pass: boolean;
}

export interface CompareReport {
  all_pass: boolean;
  seed: number;
  experiments: ExperimentReport[];
}

function need(file: string, obj: Record<string, unknown>, key: string, kind: "number" | "boolean" | "string", where: string): unknown {
  const v = obj[key];
  if (typeof v !== kind) {
    throw new SchemaError(file, `${where}: expected ${kind} field ${JSON.stringify(key)}, got ${JSON.stringify(v)}`);
  }
  return v;
}

export function parseReportJson(file: string, text: string): CompareReport {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (e) {
    throw new SchemaError(file, `not valid JSON (${(e as Error).message})`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new SchemaError(file, "expected a JSON object");
  }
  const obj = raw as Record<string, unknown>;
  const allPass = need(file, obj, "all_pass", "boolean", "report") as boolean;
  const seed = need(file, obj, "seed", "number", "report") as number;
  if (!Array.isArray(obj.experiments)) {
    throw new SchemaError(file, `report: expected array field "experiments"`);
  }
  const experiments = obj.experiments.map((entry, i) => {
    if (typeof entry !== "object" || entry === null) {
      throw new SchemaError(file, `experiments[${i}]: expected an object`);
    }
    const e = entry as Record<string, unknown>;
    const where = `experiments[${i}]`;
    return {
      experiment: need(file, e, "experiment", "string", where) as string,
      ks_stat: need(file, e, "ks_stat", "number", where) as number,
      threshold: need(file, e, "threshold", "number", where) as number,
      p_value: need(file, e, "p_value", "number", where) as number,
      n_A: need(file, e, "n_A", "number", where) as number,
      n_B: need(file, e, "n_B", "number", where) as number,
      pass: need(file, e, "pass", "boolean", where) as boolean,
    };
  });
  return { all_pass: allPass, seed, experiments };
}
