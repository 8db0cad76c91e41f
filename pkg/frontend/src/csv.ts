/**
 * Parser for the versioned triqsd results CSV.
 *
 * Layout: an optional leading comment line
 *   # triqsd-csv-v1 config={...}
 * followed by the fixed header and numeric rows. Oracle files share the
 * schema (zero stderr columns).
 */

import { readFileSync } from "node:fs";

export const SCHEMA_TAG = "triqsd-csv-v1";

export const EXPECTED_COLUMNS = [
  "time",
  "fidelity",
  "fidelity_stderr",
  "jx",
  "jy",
  "jz",
  "trace",
  "trace_stderr",
] as const;

export type ColumnName = (typeof EXPECTED_COLUMNS)[number];

export type ResultTable = {
  /** column name -> values, all of equal length */
  columns: Record<ColumnName, number[]>;
  /** parsed config echo from the comment line, if present */
  config: Record<string, unknown> | null;
  rows: number;
  source: string;
};

export class SchemaError extends Error {}

export function parseResultsCsv(text: string, source = "<string>"): ResultTable {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  let config: Record<string, unknown> | null = null;
  let start = 0;
  const first = lines[0];
  if (first === undefined) throw new SchemaError(`${source}: empty file`);
  if (first.startsWith("#")) {
    if (!first.includes(SCHEMA_TAG)) {
      throw new SchemaError(`${source}: comment line lacks the ${SCHEMA_TAG} tag`);
    }
    const at = first.indexOf("config=");
    if (at >= 0) {
      try {
        config = JSON.parse(first.slice(at + "config=".length));
      } catch {
        throw new SchemaError(`${source}: config echo is not valid JSON`);
      }
    }
    start = 1;
  }
  const header = lines[start];
  if (header === undefined) throw new SchemaError(`${source}: missing header row`);
  const names = header.split(",");
  if (names.length !== EXPECTED_COLUMNS.length ||
      !EXPECTED_COLUMNS.every((name, i) => names[i] === name)) {
    throw new SchemaError(
      `${source}: header mismatch, expected "${EXPECTED_COLUMNS.join(",")}" got "${header}"`,
    );
  }
  const columns = Object.fromEntries(
    EXPECTED_COLUMNS.map((name) => [name, [] as number[]]),
  ) as Record<ColumnName, number[]>;
  for (let i = start + 1; i < lines.length; i++) {
    const raw = lines[i]!;
    const parts = raw.split(",");
    if (parts.length !== EXPECTED_COLUMNS.length) {
      throw new SchemaError(`${source}: row ${i + 1} has ${parts.length} fields`);
    }
    EXPECTED_COLUMNS.forEach((name, k) => {
      const value = Number(parts[k]);
      if (!Number.isFinite(value)) {
        throw new SchemaError(`${source}: row ${i + 1} column ${name} is not a number`);
      }
      columns[name].push(value);
    });
  }
  const rows = columns.time.length;
  if (rows === 0) throw new SchemaError(`${source}: no data rows`);
  return { columns, config, rows, source };
}

export function loadResultsCsv(path: string): ResultTable {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new SchemaError(`cannot read ${path}: ${(err as Error).message}`);
  }
  return parseResultsCsv(text, path);
}

/** Pull a nested value out of the config echo ("gamma", "initial.mixing", ...). */
export function configValue(table: ResultTable, dotted: string): unknown {
  if (!table.config) return undefined;
  let node: unknown = table.config;
  for (const part of dotted.split(".")) {
    if (typeof node !== "object" || node === null || !(part in node)) return undefined;
    node = (node as Record<string, unknown>)[part];
  }
  return node;
}
