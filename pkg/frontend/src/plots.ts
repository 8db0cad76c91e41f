/**
 * The three figure-style renderers:
 *   timeseries — fidelity and angular momentum curves of one run
 *                (optionally with the analytic oracle overlaid in gray),
 *   overlay    — fidelity curves of several runs on one axis (sweeps),
 *   surface    — fidelity over (time, mixing degree) as a shaded 3-D sheet.
 */

import type { ResultTable } from "./csv.js";
import { BLACK, Canvas, GRAY, type RGB } from "./raster.js";
import { SERIES_STYLES, SWEEP_COLORS, styleFor } from "./style.js";

const WIDTH = 900;
const HEIGHT = 560;
const MARGIN = { left: 70, right: 30, top: 40, bottom: 60 };

type Extent = { lo: number; hi: number };

function extent(values: readonly number[], pad = 0.05): Extent {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const span = hi - lo;
  return { lo: lo - pad * span, hi: hi + pad * span };
}

function ticks(ext: Extent, count = 5): number[] {
  const span = ext.hi - ext.lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const candidates = [step, 2 * step, 2.5 * step, 5 * step, 10 * step];
  const chosen = candidates.find((c) => span / c <= count + 1) ?? 10 * step;
  const first = Math.ceil(ext.lo / chosen) * chosen;
  const out: number[] = [];
  for (let v = first; v <= ext.hi + 1e-12; v += chosen) out.push(Number(v.toFixed(12)));
  return out;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 1000 || abs < 0.01) return v.toExponential(1).replace("e", "E");
  return Number(v.toFixed(3)).toString();
}

class Axes {
  constructor(
    readonly canvas: Canvas,
    readonly x: Extent,
    readonly y: Extent,
  ) {}

  px(v: number): number {
    return (
      MARGIN.left +
      ((v - this.x.lo) / (this.x.hi - this.x.lo)) * (this.canvas.width - MARGIN.left - MARGIN.right)
    );
  }

  py(v: number): number {
    return (
      this.canvas.height -
      MARGIN.bottom -
      ((v - this.y.lo) / (this.y.hi - this.y.lo)) *
        (this.canvas.height - MARGIN.top - MARGIN.bottom)
    );
  }

  frame(xLabel: string, yLabel: string, title: string): void {
    const c = this.canvas;
    const x0 = MARGIN.left;
    const x1 = c.width - MARGIN.right;
    const y0 = MARGIN.top;
    const y1 = c.height - MARGIN.bottom;
    c.polyline(
      [
        [x0, y0],
        [x0, y1],
        [x1, y1],
        [x1, y0],
        [x0, y0],
      ],
      BLACK,
    );
    for (const t of ticks(this.x)) {
      const px = this.px(t);
      c.line(px, y1, px, y1 + 5, BLACK);
      c.textCentered(px, y1 + 10, fmt(t), BLACK);
    }
    for (const t of ticks(this.y)) {
      const py = this.py(t);
      c.line(x0 - 5, py, x0, py, BLACK);
      c.text(x0 - 8 - 6 * fmt(t).length, py - 3, fmt(t), BLACK);
    }
    c.textCentered((x0 + x1) / 2, c.height - 22, xLabel, BLACK);
    // y label drawn horizontally above the axis to keep the renderer simple
    c.text(8, y0 - 18, yLabel, BLACK);
    c.textCentered((x0 + x1) / 2, 14, title, BLACK, 2);
  }

  series(xs: readonly number[], ys: readonly number[], color: RGB, dash: readonly number[],
         thickness = 1): void {
    const pts = xs.map((x, i) => [this.px(x), this.py(ys[i]!)] as const);
    this.canvas.polyline(pts, color, dash, thickness);
  }
}

function legendBox(
  canvas: Canvas,
  entries: ReadonlyArray<{ label: string; color: RGB; dash: readonly number[] }>,
  x: number,
  y: number,
): void {
  const lineLen = 34;
  const rowH = 14;
  entries.forEach((entry, i) => {
    const ry = y + i * rowH;
    canvas.line(x, ry + 3, x + lineLen, ry + 3, entry.color, entry.dash, 2);
    canvas.text(x + lineLen + 6, ry, entry.label, BLACK);
  });
}

export function renderTimeseries(
  table: ResultTable,
  title: string,
  oracle?: ResultTable,
): Canvas {
  const canvas = new Canvas(WIDTH, HEIGHT);
  const time = table.columns.time;
  const all = SERIES_STYLES.flatMap((s) => table.columns[s.key]);
  const axes = new Axes(canvas, extent(time, 0.0), extent([...all, 1.0, -1.0], 0.06));
  axes.frame("TIME", "FIDELITY, <J>", title);
  if (oracle) {
    for (const style of SERIES_STYLES) {
      axes.series(oracle.columns.time, oracle.columns[style.key], GRAY, [], 1);
    }
  }
  for (const style of SERIES_STYLES) {
    axes.series(time, table.columns[style.key], style.color, style.dash, 2);
  }
  const entries = SERIES_STYLES.map((s) => ({ label: s.label, color: s.color, dash: s.dash }));
  if (oracle) entries.push({ label: "EXACT", color: GRAY, dash: [] });
  legendBox(canvas, entries, WIDTH - MARGIN.right - 150, MARGIN.top + 10);
  return canvas;
}

export function renderOverlay(
  tables: ReadonlyArray<{ table: ResultTable; label: string }>,
  title: string,
): Canvas {
  if (tables.length === 0) throw new Error("overlay needs at least one table");
  const canvas = new Canvas(WIDTH, HEIGHT);
  const allT = tables.flatMap((t) => t.table.columns.time);
  const allF = tables.flatMap((t) => t.table.columns.fidelity);
  const axes = new Axes(canvas, extent(allT, 0.0), extent([...allF, 1.0], 0.06));
  axes.frame("TIME", "FIDELITY", title);
  const style = styleFor("fidelity");
  tables.forEach((entry, i) => {
    const color = SWEEP_COLORS[i % SWEEP_COLORS.length]!;
    axes.series(entry.table.columns.time, entry.table.columns.fidelity, color, style.dash, 2);
  });
  legendBox(
    canvas,
    tables.map((entry, i) => ({
      label: entry.label,
      color: SWEEP_COLORS[i % SWEEP_COLORS.length]!,
      dash: style.dash,
    })),
    WIDTH - MARGIN.right - 170,
    HEIGHT - MARGIN.bottom - 16 * tables.length - 12,
  );
  return canvas;
}

/**
 * Shaded sheet of fidelity over (time, sweep parameter), isometric-ish
 * projection, painter's order from the back row forward.
 */
export function renderSurface(
  tables: ReadonlyArray<{ table: ResultTable; param: number }>,
  title: string,
  paramLabel = "MIXING M",
): Canvas {
  if (tables.length < 2) throw new Error("surface needs at least two parameter rows");
  const rows = [...tables].sort((a, b) => a.param - b.param);
  const canvas = new Canvas(WIDTH, HEIGHT);
  const nT = Math.min(...rows.map((r) => r.table.rows));
  const stride = Math.max(1, Math.floor(nT / 120));
  const tmax = rows[0]!.table.columns.time[nT - 1]!;
  const pLo = rows[0]!.param;
  const pHi = rows[rows.length - 1]!.param;
  const fAll = rows.flatMap((r) => r.table.columns.fidelity.slice(0, nT));
  const fLo = Math.min(...fAll, 0.0);
  const fHi = Math.max(...fAll, 1.0);

  const ox = 150;
  const oy = HEIGHT - 150;
  const ax = 560; // time axis screen span
  const bx = 170; // parameter axis x-shear
  const by = 120; // parameter axis y-rise
  const cz = 260; // fidelity height

  const project = (ti: number, pi: number, f: number): [number, number] => {
    const u = rows[pi]!.table.columns.time[ti]! / tmax;
    const v = rows.length > 1 ? pi / (rows.length - 1) : 0;
    const w = (f - fLo) / (fHi - fLo);
    return [ox + u * ax + v * bx, oy + v * -by - w * cz + u * 18];
  };

  for (let pi = rows.length - 2; pi >= 0; pi--) {
    for (let k = nT - 1 - stride; k >= 0; k -= stride) {
      const k2 = Math.min(k + stride, nT - 1);
      const fa = rows[pi]!.table.columns.fidelity;
      const fb = rows[pi + 1]!.table.columns.fidelity;
      const quad = [
        project(k, pi, fa[k]!),
        project(k2, pi, fa[k2]!),
        project(k2, pi + 1, fb[k2]!),
        project(k, pi + 1, fb[k]!),
      ] as const;
      const mean = (fa[k]! + fa[k2]! + fb[k]! + fb[k2]!) / 4;
      const shade = (mean - fLo) / (fHi - fLo);
      const color: RGB = [
        Math.round(40 + 50 * shade),
        Math.round(60 + 120 * shade),
        Math.round(140 + 90 * shade),
      ];
      canvas.fillPolygon(quad, color);
      canvas.line(...quad[0], ...quad[1], [25, 35, 70]);
    }
  }
  for (let pi = 0; pi < rows.length; pi++) {
    const f = rows[pi]!.table.columns.fidelity;
    const pts: Array<readonly [number, number]> = [];
    for (let k = 0; k < nT; k += stride) pts.push(project(k, pi, f[k]!));
    canvas.polyline(pts, BLACK, [], 1);
  }

  // axes: time along the front edge, parameter along the left-back edge
  const t0 = project(0, 0, fLo);
  const t1 = project(nT - 1, 0, fLo);
  const p1 = project(0, rows.length - 1, fLo);
  canvas.line(...t0, ...t1, BLACK, [], 2);
  canvas.line(...t0, ...p1, BLACK, [], 2);
  canvas.textCentered((t0[0] + t1[0]) / 2, oy + 40, "TIME", BLACK);
  canvas.text(p1[0] - 120, p1[1] - 16, paramLabel, BLACK);
  canvas.text(t0[0] - 110, oy - cz, "FIDELITY", BLACK);
  canvas.textCentered(WIDTH / 2, 14, title, BLACK, 2);
  canvas.text(t0[0] - 8, oy + 8, "0", BLACK);
  canvas.textCentered(t1[0], t1[1] + 14, fmt(tmax), BLACK);
  canvas.text(p1[0] - 44, p1[1] + 2, fmt(pHi), BLACK);
  canvas.text(t0[0] - 44, t0[1] - 8, fmt(pLo), BLACK);
  return canvas;
}
