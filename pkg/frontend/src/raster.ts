/**
 * Minimal RGBA raster surface with dashed polylines, filled polygons, bitmap
 * text, and a hand-rolled PNG encoder (RGBA8, single IDAT, zlib from node).
 * Rendering is fully deterministic: no timestamps or metadata chunks.
 */

import { deflateSync, crc32 } from "node:zlib";

import { GLYPH_HEIGHT, GLYPH_WIDTH, glyphFor } from "./font.js";

export type RGB = readonly [number, number, number];

export const BLACK: RGB = [0, 0, 0];
export const WHITE: RGB = [255, 255, 255];
export const GRAY: RGB = [150, 150, 150];

/** On/off run lengths in pixels; [] means solid. */
export type DashPattern = readonly number[];

export class Canvas {
  readonly width: number;
  readonly height: number;
  readonly pixels: Uint8ClampedArray;

  constructor(width: number, height: number, background: RGB = WHITE) {
    this.width = width;
    this.height = height;
    this.pixels = new Uint8ClampedArray(width * height * 4);
    for (let i = 0; i < width * height; i++) {
      this.pixels[4 * i] = background[0];
      this.pixels[4 * i + 1] = background[1];
      this.pixels[4 * i + 2] = background[2];
      this.pixels[4 * i + 3] = 255;
    }
  }

  set(x: number, y: number, color: RGB): void {
    const xi = Math.round(x);
    const yi = Math.round(y);
    if (xi < 0 || yi < 0 || xi >= this.width || yi >= this.height) return;
    const at = 4 * (yi * this.width + xi);
    this.pixels[at] = color[0];
    this.pixels[at + 1] = color[1];
    this.pixels[at + 2] = color[2];
    this.pixels[at + 3] = 255;
  }

  get(x: number, y: number): RGB {
    const at = 4 * (y * this.width + x);
    return [this.pixels[at]!, this.pixels[at + 1]!, this.pixels[at + 2]!];
  }

  /** Bresenham segment with an optional dash pattern and stroke thickness. */
  line(
    x0: number,
    y0: number,
    x1: number,
    y1: number,
    color: RGB,
    dash: DashPattern = [],
    thickness = 1,
    dashOffset = 0,
  ): number {
    let xi0 = Math.round(x0);
    let yi0 = Math.round(y0);
    const xi1 = Math.round(x1);
    const yi1 = Math.round(y1);
    const dx = Math.abs(xi1 - xi0);
    const dy = -Math.abs(yi1 - yi0);
    const sx = xi0 < xi1 ? 1 : -1;
    const sy = yi0 < yi1 ? 1 : -1;
    let err = dx + dy;
    const period = dash.reduce((a, b) => a + b, 0);
    let travelled = dashOffset;
    for (;;) {
      let on = true;
      if (period > 0) {
        let pos = travelled % period;
        for (const run of dash) {
          if (pos < run) break;
          pos -= run;
          on = !on;
        }
      }
      if (on) {
        this.set(xi0, yi0, color);
        for (let t = 1; t < thickness; t++) {
          if (dx >= -dy) this.set(xi0, yi0 + t, color);
          else this.set(xi0 + t, yi0, color);
        }
      }
      if (xi0 === xi1 && yi0 === yi1) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        xi0 += sx;
        travelled += 1;
      }
      if (e2 <= dx) {
        err += dx;
        yi0 += sy;
        travelled += 1;
      }
    }
    return travelled;
  }

  /** Polyline that keeps the dash phase continuous across vertices. */
  polyline(
    points: ReadonlyArray<readonly [number, number]>,
    color: RGB,
    dash: DashPattern = [],
    thickness = 1,
  ): void {
    let offset = 0;
    for (let i = 1; i < points.length; i++) {
      const [xa, ya] = points[i - 1]!;
      const [xb, yb] = points[i]!;
      offset = this.line(xa, ya, xb, yb, color, dash, thickness, offset);
    }
  }

  /** Scanline fill of a convex polygon (used for surface quads). */
  fillPolygon(points: ReadonlyArray<readonly [number, number]>, color: RGB): void {
    const ys = points.map((p) => p[1]);
    const y0 = Math.max(0, Math.floor(Math.min(...ys)));
    const y1 = Math.min(this.height - 1, Math.ceil(Math.max(...ys)));
    for (let y = y0; y <= y1; y++) {
      const xs: number[] = [];
      for (let i = 0; i < points.length; i++) {
        const [xa, ya] = points[i]!;
        const [xb, yb] = points[(i + 1) % points.length]!;
        if (ya === yb) continue;
        if ((y >= ya && y < yb) || (y >= yb && y < ya)) {
          xs.push(xa + ((y - ya) * (xb - xa)) / (yb - ya));
        }
      }
      xs.sort((a, b) => a - b);
      for (let k = 0; k + 1 < xs.length; k += 2) {
        const xa = Math.max(0, Math.round(xs[k]!));
        const xb = Math.min(this.width - 1, Math.round(xs[k + 1]!));
        for (let x = xa; x <= xb; x++) this.set(x, y, color);
      }
    }
  }

  text(x: number, y: number, content: string, color: RGB, scale = 1): void {
    let cx = Math.round(x);
    const cy = Math.round(y);
    for (const ch of content) {
      const glyph = glyphFor(ch);
      for (let row = 0; row < GLYPH_HEIGHT; row++) {
        const bits = glyph[row]!;
        for (let col = 0; col < GLYPH_WIDTH; col++) {
          if ((bits >> (GLYPH_WIDTH - 1 - col)) & 1) {
            for (let dy = 0; dy < scale; dy++) {
              for (let dx = 0; dx < scale; dx++) {
                this.set(cx + col * scale + dx, cy + row * scale + dy, color);
              }
            }
          }
        }
      }
      cx += (GLYPH_WIDTH + 1) * scale;
    }
  }

  /** Centered text helper. */
  textCentered(x: number, y: number, content: string, color: RGB, scale = 1): void {
    this.text(x - ((GLYPH_WIDTH + 1) * scale * content.length) / 2, y, content, color, scale);
  }

  toPng(): Buffer {
    const raw = Buffer.alloc(this.height * (this.width * 4 + 1));
    for (let y = 0; y < this.height; y++) {
      const at = y * (this.width * 4 + 1);
      raw[at] = 0; // filter: none
      Buffer.from(this.pixels.buffer, y * this.width * 4, this.width * 4).copy(raw, at + 1);
    }
    const idat = deflateSync(raw, { level: 9 });
    const ihdr = Buffer.alloc(13);
    ihdr.writeUInt32BE(this.width, 0);
    ihdr.writeUInt32BE(this.height, 4);
    ihdr[8] = 8; // bit depth
    ihdr[9] = 6; // color type RGBA
    ihdr[10] = 0;
    ihdr[11] = 0;
    ihdr[12] = 0;
    return Buffer.concat([
      Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
      pngChunk("IHDR", ihdr),
      pngChunk("IDAT", idat),
      pngChunk("IEND", Buffer.alloc(0)),
    ]);
  }
}

function pngChunk(kind: string, payload: Buffer): Buffer {
  const head = Buffer.alloc(4);
  head.writeUInt32BE(payload.length, 0);
  const body = Buffer.concat([Buffer.from(kind, "ascii"), payload]);
  const tail = Buffer.alloc(4);
  tail.writeUInt32BE(crc32(body) >>> 0, 0);
  return Buffer.concat([head, body, tail]);
}
