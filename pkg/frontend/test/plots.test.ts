import assert from "node:assert/strict";
import { test } from "node:test";

import { loadResultsCsv } from "../src/csv.js";
import { renderOverlay, renderSurface, renderTimeseries } from "../src/plots.js";
import { SERIES_STYLES, styleFor } from "../src/style.js";
import { fixture } from "./helpers.js";

test("line-style legend follows the figure convention", () => {
  // fidelity solid, <J_x> dotted, <J_y> dashed, <J_z> dot-dashed
  assert.deepEqual(
    SERIES_STYLES.map((s) => s.key),
    ["fidelity", "jx", "jy", "jz"],
  );
  assert.equal(styleFor("fidelity").dash.length, 0);
  assert.equal(styleFor("jx").dash.length, 2);
  assert.ok(styleFor("jx").dash[0]! <= 2, "dotted = short on-runs");
  assert.equal(styleFor("jy").dash.length, 2);
  assert.ok(styleFor("jy").dash[0]! > styleFor("jx").dash[0]!, "dashes longer than dots");
  assert.equal(styleFor("jz").dash.length, 4, "dot-dash alternates two run lengths");
  // four distinct colors
  const colors = new Set(SERIES_STYLES.map((s) => s.color.join(",")));
  assert.equal(colors.size, 4);
});

test("timeseries renders a run with its oracle overlay", () => {
  const table = loadResultsCsv(fixture("fig1b_results.csv"));
  const oracle = loadResultsCsv(fixture("fig1b_oracle.csv"));
  const canvas = renderTimeseries(table, "DEPHASING, 20 PULSES", oracle);
  const png = canvas.toPng();
  assert.ok(png.length > 2000);
  // deterministic rendering
  assert.deepEqual(png, renderTimeseries(table, "DEPHASING, 20 PULSES", oracle).toPng());
});

test("overlay renders the memory-rate sweep", () => {
  const tables = ["fig2_g0.5", "fig2_g1", "fig2_g5", "fig2_g10"].map((name) => ({
    table: loadResultsCsv(fixture(`${name}_results.csv`)),
    label: name.toUpperCase(),
  }));
  const png = renderOverlay(tables, "MEMORY-RATE SWEEP").toPng();
  assert.ok(png.length > 2000);
});

test("surface renders the mixing sweep using config-echo parameters", () => {
  const entries = ["fig3a_m033", "fig3a_m067", "fig3a_m100"].map((name) => {
    const table = loadResultsCsv(fixture(`${name}_results.csv`));
    const mixing = (table.config as { initial: { mixing?: number } }).initial.mixing ?? 1.0;
    return { table, param: mixing };
  });
  const png = renderSurface(entries, "MIXING SWEEP").toPng();
  assert.ok(png.length > 2000);
});

test("surface requires at least two parameter rows", () => {
  const table = loadResultsCsv(fixture("fig3a_m033_results.csv"));
  assert.throws(() => renderSurface([{ table, param: 1 / 3 }], "X"));
});

test("plots differ when the data differs", () => {
  const a = loadResultsCsv(fixture("fig2_g0.5_results.csv"));
  const b = loadResultsCsv(fixture("fig2_g10_results.csv"));
  const pngA = renderTimeseries(a, "T").toPng();
  const pngB = renderTimeseries(b, "T").toPng();
  assert.notDeepEqual(pngA, pngB);
});
