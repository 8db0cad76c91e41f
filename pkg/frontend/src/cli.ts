#!/usr/bin/env node
/**
 * Figure-style plot renderer for triqsd result CSVs.
 *
 *   triqsd-plot timeseries --input run_results.csv [--oracle run_oracle.csv]
 *                          [--title TXT] --out fig.png
 *   triqsd-plot overlay    --input a.csv --input b.csv [--label-key gamma]
 *                          [--title TXT] --out fig.png
 *   triqsd-plot surface    --input m033.csv --input m067.csv ...
 *                          [--param-key initial.mixing] [--title TXT] --out fig.png
 *
 * Labels and sweep parameters default to values read from each CSV's
 * embedded config echo. Exit codes: 0 ok, 1 usage, 2 schema/input error.
 */

import { writeFileSync } from "node:fs";

import { SchemaError, configValue, loadResultsCsv, type ResultTable } from "./csv.js";
import { renderOverlay, renderSurface, renderTimeseries } from "./plots.js";

class UsageError extends Error {}

type Options = {
  command: string;
  inputs: string[];
  oracle?: string;
  out?: string;
  title?: string;
  labelKey: string;
  paramKey: string;
};

function parseArgs(argv: string[]): Options {
  const [command, ...rest] = argv;
  if (!command || ["-h", "--help", "help"].includes(command)) {
    throw new UsageError(usage());
  }
  if (!["timeseries", "overlay", "surface"].includes(command)) {
    throw new UsageError(`unknown command "${command}"\n${usage()}`);
  }
  const opts: Options = {
    command,
    inputs: [],
    labelKey: "gamma",
    paramKey: "initial.mixing",
  };
  for (let i = 0; i < rest.length; i++) {
    const flag = rest[i]!;
    const next = () => {
      const v = rest[++i];
      if (v === undefined) throw new UsageError(`flag ${flag} needs a value`);
      return v;
    };
    switch (flag) {
      case "--input":
        opts.inputs.push(next());
        break;
      case "--oracle":
        opts.oracle = next();
        break;
      case "--out":
        opts.out = next();
        break;
      case "--title":
        opts.title = next();
        break;
      case "--label-key":
        opts.labelKey = next();
        break;
      case "--param-key":
        opts.paramKey = next();
        break;
      default:
        throw new UsageError(`unknown flag "${flag}"\n${usage()}`);
    }
  }
  if (opts.inputs.length === 0) throw new UsageError("at least one --input is required");
  if (!opts.out) throw new UsageError("--out is required");
  return opts;
}

function usage(): string {
  return (
    "usage: triqsd-plot <timeseries|overlay|surface> --input CSV [--input CSV ...]\n" +
    "                   [--oracle CSV] [--title TXT] [--label-key KEY]\n" +
    "                   [--param-key KEY] --out FILE.png"
  );
}

function runLabel(table: ResultTable, key: string, fallback: string): string {
  const name = configValue(table, "run_name");
  const value = configValue(table, key);
  if (value !== undefined) return `${key.split(".").pop()}=${value}`;
  if (typeof name === "string") return name.toUpperCase();
  return fallback;
}

export function run(argv: string[]): number {
  let opts: Options;
  try {
    opts = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(err.message);
      return 1;
    }
    throw err;
  }
  try {
    const tables = opts.inputs.map((path) => loadResultsCsv(path));
    let canvas;
    if (opts.command === "timeseries") {
      if (tables.length !== 1) throw new UsageError("timeseries takes exactly one --input");
      const oracle = opts.oracle ? loadResultsCsv(opts.oracle) : undefined;
      const title =
        opts.title ?? runLabel(tables[0]!, "run_name", "TIME SERIES").toUpperCase();
      canvas = renderTimeseries(tables[0]!, title, oracle);
    } else if (opts.command === "overlay") {
      const entries = tables.map((table, i) => ({
        table,
        label: runLabel(table, opts.labelKey, `RUN ${i + 1}`),
      }));
      canvas = renderOverlay(entries, opts.title ?? "SWEEP OVERLAY");
    } else {
      const entries = tables.map((table, i) => {
        const raw = configValue(table, opts.paramKey);
        const param = typeof raw === "number" ? raw : Number(raw);
        if (!Number.isFinite(param)) {
          throw new SchemaError(
            `${table.source}: no numeric ${opts.paramKey} in the config echo; pass --param-key`,
          );
        }
        return { table, param };
      });
      canvas = renderSurface(entries, opts.title ?? "MIXING SWEEP");
    }
    writeFileSync(opts.out!, canvas.toPng());
    console.log(`wrote ${opts.out}`);
    return 0;
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(err.message);
      return 1;
    }
    if (err instanceof SchemaError) {
      console.error(`input error: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

const invokedDirectly = process.argv[1] && import.meta.url.endsWith(
  process.argv[1].split("/").pop() ?? "",
);
if (invokedDirectly) {
  process.exit(run(process.argv.slice(2)));
}
