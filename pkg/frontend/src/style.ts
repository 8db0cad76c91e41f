/**
 * Line-style convention shared by every plot, matching the source figures'
 * legend: fidelity black solid, <J_x> red dotted, <J_y> green dashed,
 * <J_z> blue dot-dashed.
 */

import type { DashPattern, RGB } from "./raster.js";

export type SeriesKey = "fidelity" | "jx" | "jy" | "jz";

export type SeriesStyle = {
  key: SeriesKey;
  label: string;
  color: RGB;
  dash: DashPattern;
};

export const SERIES_STYLES: readonly SeriesStyle[] = [
  { key: "fidelity", label: "FIDELITY", color: [0, 0, 0], dash: [] },
  { key: "jx", label: "<JX>", color: [200, 30, 30], dash: [2, 3] },
  { key: "jy", label: "<JY>", color: [20, 140, 50], dash: [7, 4] },
  { key: "jz", label: "<JZ>", color: [30, 60, 200], dash: [9, 3, 2, 3] },
];

export function styleFor(key: SeriesKey): SeriesStyle {
  const style = SERIES_STYLES.find((s) => s.key === key);
  if (!style) throw new Error(`no style for series ${key}`);
  return style;
}

/** Distinct colors for sweep overlays (one curve per run). */
export const SWEEP_COLORS: readonly RGB[] = [
  [0, 0, 0],
  [200, 30, 30],
  [20, 140, 50],
  [30, 60, 200],
  [190, 120, 0],
  [140, 30, 160],
  [0, 150, 160],
];
