/**
 * Minimal retained scene: every chart builds a flat list of primitives
 * which both the SVG writer and the rasterizer consume, so the two output
 * formats always agree and stay deterministic.
 */

export type Anchor = "start" | "middle" | "end";

export interface RectPrim {
  kind: "rect";
  x: number;
  y: number;
  w: number;
  h: number;
  fill: string;
  opacity?: number;
}

export interface LinePrim {
  kind: "line";
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  stroke: string;
  width: number;
  opacity?: number;
}

export interface PolylinePrim {
  kind: "polyline";
  points: Array<[number, number]>;
  stroke: string;
  width: number;
}

export interface CirclePrim {
  kind: "circle";
  cx: number;
  cy: number;
  r: number;
  fill: string;
}

export interface TextPrim {
  kind: "text";
  x: number;
  y: number; // baseline
  text: string;
  size: number;
  fill: string;
  anchor: Anchor;
}

export type Primitive = RectPrim | LinePrim | PolylinePrim | CirclePrim | TextPrim;

export interface Scene {
  width: number;
  height: number;
  background: string;
  items: Primitive[];
  warnings: string[];
}

export function makeScene(width: number, height: number): Scene {
  return { width, height, background: "#ffffff", items: [], warnings: [] };
}

/** Linear data-to-pixel axis mapping. */
export interface AxisScale {
  lo: number;
  hi: number;
  pxLo: number;
  pxHi: number;
}

export function scale(axis: AxisScale, value: number): number {
  const span = axis.hi - axis.lo;
  const t = span === 0 ? 0.5 : (value - axis.lo) / span;
  return axis.pxLo + t * (axis.pxHi - axis.pxLo);
}

/** Pad a [lo, hi] data range by a fraction on both sides. */
export function padded(lo: number, hi: number, frac = 0.08): [number, number] {
  if (!isFinite(lo) || !isFinite(hi)) return [0, 1];
  if (lo === hi) {
    const pad = lo === 0 ? 1 : Math.abs(lo) * frac;
    return [lo - pad, hi + pad];
  }
  const pad = (hi - lo) * frac;
  return [lo - pad, hi + pad];
}

/** Round-valued tick positions covering [lo, hi]. */
export function ticks(lo: number, hi: number, target = 5): number[] {
  if (!isFinite(lo) || !isFinite(hi) || lo === hi) return [lo];
  const rawStep = (hi - lo) / target;
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = power;
  for (const mult of [1, 2, 2.5, 5, 10]) {
    if (power * mult >= rawStep) {
      step = power * mult;
      break;
    }
  }
  const out: number[] = [];
  let v = Math.ceil(lo / step) * step;
  while (v <= hi + step * 1e-9) {
    out.push(Number(v.toFixed(12)));
    v += step;
  }
  return out;
}

/** Fixed-format numbers so file bytes never depend on locale or platform. */
export function fmt(value: number, digits = 3): string {
  if (Number.isInteger(value) && Math.abs(value) < 1e6) return String(value);
  const abs = Math.abs(value);
  if (abs !== 0 && (abs < 1e-3 || abs >= 1e6)) return value.toExponential(2);
  return value.toFixed(digits).replace(/\.?0+$/, "");
}
