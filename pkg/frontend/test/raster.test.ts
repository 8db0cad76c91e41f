import assert from "node:assert/strict";
import { test } from "node:test";
import { inflateSync } from "node:zlib";

import { BLACK, Canvas, WHITE } from "../src/raster.js";

test("png output has a valid structure and round-trips pixel data", () => {
  const canvas = new Canvas(20, 10);
  canvas.set(3, 4, BLACK);
  const png = canvas.toPng();
  assert.deepEqual(
    [...png.subarray(0, 8)],
    [0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a],
  );
  assert.equal(png.subarray(12, 16).toString("ascii"), "IHDR");
  assert.equal(png.readUInt32BE(16), 20);
  assert.equal(png.readUInt32BE(20), 10);
  assert.equal(png[24], 8); // bit depth
  assert.equal(png[25], 6); // RGBA
  const idatLen = png.readUInt32BE(33);
  assert.equal(png.subarray(37, 41).toString("ascii"), "IDAT");
  const raw = inflateSync(png.subarray(41, 41 + idatLen));
  assert.equal(raw.length, 10 * (20 * 4 + 1));
  const rowStart = 4 * (20 * 4 + 1);
  assert.equal(raw[rowStart], 0); // filter byte
  assert.equal(raw[rowStart + 1 + 3 * 4], 0); // black pixel R
  assert.equal(raw[rowStart + 1 + 2 * 4], 255); // untouched pixel stays white
  assert.equal(png.subarray(png.length - 8, png.length - 4).toString("ascii"), "IEND");
});

test("rendering is deterministic", () => {
  const make = () => {
    const canvas = new Canvas(60, 40);
    canvas.polyline(
      [
        [5, 5],
        [50, 20],
        [10, 35],
      ],
      [10, 20, 30],
      [4, 3],
      2,
    );
    canvas.text(4, 4, "ABC 0.5", BLACK);
    return canvas.toPng();
  };
  assert.deepEqual(make(), make());
});

test("dashed lines skip pixels while solid lines do not", () => {
  const canvas = new Canvas(50, 5, WHITE);
  canvas.line(0, 1, 49, 1, BLACK);
  canvas.line(0, 3, 49, 3, BLACK, [2, 4]);
  const litSolid = countLit(canvas, 1);
  const litDashed = countLit(canvas, 3);
  assert.equal(litSolid, 50);
  assert.ok(litDashed < 30 && litDashed > 10, `dashed lit ${litDashed}`);
});

test("polygon fill covers the interior", () => {
  const canvas = new Canvas(30, 30);
  canvas.fillPolygon(
    [
      [5, 5],
      [25, 5],
      [25, 25],
      [5, 25],
    ],
    BLACK,
  );
  assert.deepEqual(canvas.get(15, 15), [0, 0, 0]);
  assert.deepEqual(canvas.get(2, 2), [255, 255, 255]);
});

test("text renders visible glyph pixels", () => {
  const canvas = new Canvas(80, 12);
  canvas.text(1, 1, "FIDELITY", BLACK);
  let lit = 0;
  for (let y = 0; y < 12; y++) for (let x = 0; x < 80; x++) {
    if (canvas.get(x, y)[0] === 0) lit++;
  }
  assert.ok(lit > 50, `only ${lit} pixels lit`);
});

function countLit(canvas: Canvas, row: number): number {
  let lit = 0;
  for (let x = 0; x < canvas.width; x++) {
    if (canvas.get(x, row)[0] === 0) lit++;
  }
  return lit;
}
