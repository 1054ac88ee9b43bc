/**
 * Strict readers for the rdex CSV artifacts.
 *
 * The CSVs are machine-written (comma-separated, single header row, no
 * quoting); anything that deviates from a documented schema is an error,
 * never a silent skip. The renderer must not recompute statistics, so each
 * reader exposes exactly the columns the figures consume.
 */

import { readFileSync } from "node:fs";

export class SchemaError extends Error {}

export interface Table {
  header: string[];
  rows: string[][];
}

export function readTable(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new SchemaError(`cannot read ${path}: ${(err as Error).message}`);
  }
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${path}: file is empty`);
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((l) => l.split(","));
  if (rows.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  for (const [i, row] of rows.entries()) {
    if (row.length !== header.length) {
      throw new SchemaError(
        `${path}: row ${i + 2} has ${row.length} fields, header has ${header.length}`,
      );
    }
  }
  return { header, rows };
}

function columnIndex(table: Table, name: string, path: string): number {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(
      `${path}: missing column '${name}' (have: ${table.header.join(", ")})`,
    );
  }
  return idx;
}

function num(raw: string, column: string, path: string): number {
  const v = Number(raw);
  if (!Number.isFinite(v)) {
    throw new SchemaError(`${path}: non-numeric value '${raw}' in column '${column}'`);
  }
  return v;
}

export function columns(
  path: string,
  names: string[],
): Record<string, number[]> {
  const table = readTable(path);
  const out: Record<string, number[]> = {};
  for (const name of names) {
    const idx = columnIndex(table, name, path);
    out[name] = table.rows.map((r) => num(r[idx], name, path));
  }
  return out;
}

/** spectrum.csv: k1 [,k2,k3], variance, stderr, lambda_theory, z, ... */
export interface SpectrumData {
  ksq: number[];
  variance: number[];
  stderr: number[];
  lambda: number[];
}

export function readSpectrum(path: string): SpectrumData {
  const table = readTable(path);
  const kcols = table.header.filter((h) => /^k\d+$/.test(h));
  if (kcols.length === 0) {
    throw new SchemaError(`${path}: no wavevector columns k1..kd`);
  }
  const kidx = kcols.map((c) => columnIndex(table, c, path));
  const vi = columnIndex(table, "variance", path);
  const si = columnIndex(table, "stderr", path);
  const li = columnIndex(table, "lambda_theory", path);
  const ksq = table.rows.map((r) =>
    kidx.reduce((acc, i) => acc + num(r[i], "k", path) ** 2, 0),
  );
  return {
    ksq,
    variance: table.rows.map((r) => num(r[vi], "variance", path)),
    stderr: table.rows.map((r) => num(r[si], "stderr", path)),
    lambda: table.rows.map((r) => num(r[li], "lambda_theory", path)),
  };
}

/** hydrostatics.csv: n, msq, stderr, fit_slope, fit_intercept */
export interface HydrostaticsData {
  n: number[];
  msq: number[];
  stderr: number[];
  slope: number;
  intercept: number;
}

export function readHydrostatics(path: string): HydrostaticsData {
  const c = columns(path, ["n", "msq", "stderr", "fit_slope", "fit_intercept"]);
  const slope = c.fit_slope[0];
  if (!c.fit_slope.every((v) => v === slope)) {
    throw new SchemaError(`${path}: fit_slope must be constant across rows`);
  }
  return {
    n: c.n,
    msq: c.msq,
    stderr: c.stderr,
    slope,
    intercept: c.fit_intercept[0],
  };
}

/** localeq.csv: n, R, lam, tv, stderr, bias_floor */
export interface TvDecayData {
  n: number[];
  tv: number[];
  stderr: number[];
  floor: number[];
}

export function readTvDecay(path: string): TvDecayData {
  const c = columns(path, ["n", "tv", "stderr", "bias_floor"]);
  return { n: c.n, tv: c.tv, stderr: c.stderr, floor: c.bias_floor };
}

/** pde_trajectory.csv: t, u0..u{M-1} */
export interface ProfilesData {
  times: number[];
  profiles: number[][];
}

export function readProfiles(path: string): ProfilesData {
  const table = readTable(path);
  if (table.header[0] !== "t") {
    throw new SchemaError(`${path}: first column must be 't'`);
  }
  const ucols = table.header.slice(1);
  if (!ucols.every((h, i) => h === `u${i}`)) {
    throw new SchemaError(`${path}: profile columns must be u0..u{M-1}`);
  }
  return {
    times: table.rows.map((r) => num(r[0], "t", path)),
    profiles: table.rows.map((r) =>
      r.slice(1).map((v, i) => num(v, `u${i}`, path)),
    ),
  };
}
