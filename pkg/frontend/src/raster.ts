/** Software rasterizer for the scene primitives plus PNG encoding.
 *
 * Everything is integer/scanline based with fixed rounding, so a given
 * scene always produces byte-identical PNG output on any platform; no
 * system fonts or native rasterizers are involved.
 */

import { PNG } from "pngjs";
import { GLYPH_HEIGHT, GLYPH_WIDTH, glyph } from "./font";
import { Primitive, Scene, TextPrim } from "./scene";

interface Rgb {
  r: number;
  g: number;
  b: number;
}

function parseColor(color: string): Rgb {
  const hex = color.startsWith("#") ? color.slice(1) : color;
  if (hex.length === 3) {
    return {
      r: parseInt(hex[0] + hex[0], 16),
      g: parseInt(hex[1] + hex[1], 16),
      b: parseInt(hex[2] + hex[2], 16),
    };
  }
  return {
    r: parseInt(hex.slice(0, 2), 16),
    g: parseInt(hex.slice(2, 4), 16),
    b: parseInt(hex.slice(4, 6), 16),
  };
}

class Canvas {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8Array;

  constructor(width: number, height: number) {
    this.width = width;
    this.height = height;
    this.data = new Uint8Array(width * height * 4);
  }

  blend(x: number, y: number, color: Rgb, alpha: number): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height || alpha <= 0) return;
    const i = (y * this.width + x) * 4;
    const inv = 1 - alpha;
    this.data[i] = Math.round(color.r * alpha + this.data[i] * inv);
    this.data[i + 1] = Math.round(color.g * alpha + this.data[i + 1] * inv);
    this.data[i + 2] = Math.round(color.b * alpha + this.data[i + 2] * inv);
    this.data[i + 3] = 255;
  }

  fillRect(x0: number, y0: number, w: number, h: number, color: Rgb, alpha: number): void {
    const xa = Math.round(x0);
    const ya = Math.round(y0);
    const xb = Math.round(x0 + w);
    const yb = Math.round(y0 + h);
    for (let y = ya; y < yb; y++) {
      for (let x = xa; x < xb; x++) this.blend(x, y, color, alpha);
    }
  }

  /** Stamped line: a filled square of the stroke width at every step. */
  line(x1: number, y1: number, x2: number, y2: number, width: number, color: Rgb, alpha: number): void {
    const steps = Math.max(Math.abs(x2 - x1), Math.abs(y2 - y1), 1);
    const n = Math.ceil(steps);
    const half = Math.max(Math.round(width / 2), width > 1 ? 1 : 0);
    for (let s = 0; s <= n; s++) {
      const t = s / n;
      const cx = Math.round(x1 + (x2 - x1) * t);
      const cy = Math.round(y1 + (y2 - y1) * t);
      for (let dy = -half; dy <= half; dy++) {
        for (let dx = -half; dx <= half; dx++) {
          this.blend(cx + dx, cy + dy, color, alpha);
        }
      }
    }
  }

  disc(cx: number, cy: number, r: number, color: Rgb): void {
    const ir = Math.ceil(r);
    for (let dy = -ir; dy <= ir; dy++) {
      for (let dx = -ir; dx <= ir; dx++) {
        if (dx * dx + dy * dy <= r * r) {
          this.blend(Math.round(cx) + dx, Math.round(cy) + dy, color, 1);
        }
      }
    }
  }
}

export function textWidth(text: string, size: number): number {
  const cell = size / GLYPH_HEIGHT;
  return text.length * (GLYPH_WIDTH + 1) * cell;
}

function drawText(canvas: Canvas, item: TextPrim): void {
  const color = parseColor(item.fill);
  const cell = item.size / GLYPH_HEIGHT;
  const total = textWidth(item.text, item.size);
  let originX = item.x;
  if (item.anchor === "middle") originX -= total / 2;
  if (item.anchor === "end") originX -= total;
  const top = item.y - item.size; // baseline to glyph top
  for (let c = 0; c < item.text.length; c++) {
    const rows = glyph(item.text[c]);
    const glyphX = originX + c * (GLYPH_WIDTH + 1) * cell;
    for (let row = 0; row < GLYPH_HEIGHT; row++) {
      for (let col = 0; col < GLYPH_WIDTH; col++) {
        if ((rows[row] >> (GLYPH_WIDTH - 1 - col)) & 1) {
          canvas.fillRect(
            glyphX + col * cell,
            top + row * cell,
            Math.max(cell, 1),
            Math.max(cell, 1),
            color,
            1,
          );
        }
      }
    }
  }
}

function drawItem(canvas: Canvas, item: Primitive): void {
  switch (item.kind) {
    case "rect":
      canvas.fillRect(item.x, item.y, item.w, item.h, parseColor(item.fill), item.opacity ?? 1);
      break;
    case "line":
      canvas.line(
        item.x1, item.y1, item.x2, item.y2, item.width,
        parseColor(item.stroke), item.opacity ?? 1,
      );
      break;
    case "polyline":
      for (let i = 1; i < item.points.length; i++) {
        canvas.line(
          item.points[i - 1][0], item.points[i - 1][1],
          item.points[i][0], item.points[i][1],
          item.width, parseColor(item.stroke), 1,
        );
      }
      break;
    case "circle":
      canvas.disc(item.cx, item.cy, item.r, parseColor(item.fill));
      break;
    case "text":
      drawText(canvas, item);
      break;
  }
}

export function sceneToPng(scene: Scene): Buffer {
  const canvas = new Canvas(scene.width, scene.height);
  canvas.fillRect(0, 0, scene.width, scene.height, parseColor(scene.background), 1);
  for (const item of scene.items) drawItem(canvas, item);
  const png = new PNG({ width: scene.width, height: scene.height });
  Buffer.from(canvas.data.buffer).copy(png.data);
  return PNG.sync.write(png);
}
