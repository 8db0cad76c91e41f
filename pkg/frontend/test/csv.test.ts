import assert from "node:assert/strict";
import { readFileSync } from "node:fs";
import { test } from "node:test";

import {
  EXPECTED_COLUMNS,
  SchemaError,
  configValue,
  loadResultsCsv,
  parseResultsCsv,
} from "../src/csv.js";
import { fixture } from "./helpers.js";

test("parses a real results file with config echo", () => {
  const table = loadResultsCsv(fixture("fig1b_results.csv"));
  assert.equal(table.rows, 60);
  for (const name of EXPECTED_COLUMNS) {
    assert.equal(table.columns[name].length, table.rows);
  }
  assert.equal(table.columns.time[0], 0);
  assert.ok(Math.abs(table.columns.fidelity[0]! - 1) < 1e-9);
  assert.equal(configValue(table, "model"), "dephasing");
  assert.equal(configValue(table, "schedule.outer"), 20);
  assert.equal(configValue(table, "n_traj"), 200);
});

test("oracle files share the schema with zero errors", () => {
  const oracle = loadResultsCsv(fixture("fig1b_oracle.csv"));
  assert.ok(oracle.columns.fidelity_stderr.every((v) => v === 0));
  assert.ok(oracle.columns.trace.every((v) => Math.abs(v - 1) < 1e-12));
});

test("rejects a wrong header", () => {
  assert.throws(() => parseResultsCsv("time,fidelity\n0,1\n"), SchemaError);
});

test("rejects an empty file and missing rows", () => {
  assert.throws(() => parseResultsCsv(""), SchemaError);
  const headerOnly = readFileSync(fixture("fig1b_results.csv"), "utf8")
    .split("\n")
    .slice(0, 2)
    .join("\n");
  assert.throws(() => parseResultsCsv(headerOnly), SchemaError);
});

test("rejects non-numeric cells and ragged rows", () => {
  const good = readFileSync(fixture("fig1b_results.csv"), "utf8");
  const lines = good.split("\n");
  const corruptCell = [...lines];
  corruptCell[2] = corruptCell[2]!.replace(/^[^,]+/, "oops");
  assert.throws(() => parseResultsCsv(corruptCell.join("\n")), SchemaError);
  const ragged = [...lines];
  ragged[2] = ragged[2]! + ",1";
  assert.throws(() => parseResultsCsv(ragged.join("\n")), SchemaError);
});

test("rejects an unknown schema tag", () => {
  assert.throws(
    () => parseResultsCsv("# other-schema config={}\n" + EXPECTED_COLUMNS.join(",") + "\n"),
    SchemaError,
  );
});

test("missing file reports a schema error", () => {
  assert.throws(() => loadResultsCsv(fixture("does_not_exist.csv")), SchemaError);
});
