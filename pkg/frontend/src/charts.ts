/** Chart builders: each consumes parsed CSV tables and produces a scene.
 *
 * rate-sweep: loss on the x-axis, rate on the y-axis, one shaded band per
 * in-region row (so the shading covers exactly the rows flagged
 * in_region = 1), capacity markers for C and C_eps.
 *
 * train-compare: two panels, mutual-information estimate per epoch and
 * accuracy per rate, one line per method averaged over seeds.
 *
 * bound-table: a formatted table, with any row whose discrepancy exceeds
 * its bound highlighted as a violation.
 */

import {
  ACCURACY_RATE_COLUMNS,
  BOUND_TABLE_COLUMNS,
  RATE_SWEEP_COLUMNS,
  SchemaError,
  TRAIN_TRACE_COLUMNS,
  Table,
  num,
  requireColumns,
} from "./csv";
import { AxisScale, Scene, fmt, makeScene, padded, scale, ticks } from "./scene";

export interface StyleOptions {
  title?: string;
  regionShading: boolean;
}

export const METHOD_COLORS: Record<string, string> = {
  robust: "#1f77b4",
  vanilla: "#ff7f0e",
};
const EXTRA_COLORS = ["#2ca02c", "#d62728", "#9467bd", "#8c564b"];
const AXIS = "#333333";
const GRID = "#dddddd";
const REGION = "#9ecae1";
const CURVE = "#1f77b4";

function methodColor(method: string, index: number): string {
  return METHOD_COLORS[method] ?? EXTRA_COLORS[index % EXTRA_COLORS.length];
}

interface Frame {
  x: AxisScale;
  y: AxisScale;
}

function drawFrame(
  scene: Scene,
  frame: Frame,
  xLabel: string,
  yLabel: string,
  xTicks: number[],
  yTicks: number[],
): void {
  const { x, y } = frame;
  for (const t of xTicks) {
    const px = scale(x, t);
    scene.items.push({ kind: "line", x1: px, y1: scale(y, y.lo), x2: px, y2: scale(y, y.hi), stroke: GRID, width: 1 });
    scene.items.push({ kind: "text", x: px, y: scale(y, y.lo) + 16, text: fmt(t), size: 10, fill: AXIS, anchor: "middle" });
  }
  for (const t of yTicks) {
    const py = scale(y, t);
    scene.items.push({ kind: "line", x1: scale(x, x.lo), y1: py, x2: scale(x, x.hi), y2: py, stroke: GRID, width: 1 });
    scene.items.push({ kind: "text", x: scale(x, x.lo) - 6, y: py + 3, text: fmt(t), size: 10, fill: AXIS, anchor: "end" });
  }
  scene.items.push({ kind: "line", x1: x.pxLo, y1: y.pxLo, x2: x.pxHi, y2: y.pxLo, stroke: AXIS, width: 1 });
  scene.items.push({ kind: "line", x1: x.pxLo, y1: y.pxLo, x2: x.pxLo, y2: y.pxHi, stroke: AXIS, width: 1 });
  scene.items.push({
    kind: "text", x: (x.pxLo + x.pxHi) / 2, y: y.pxLo + 32, text: xLabel,
    size: 11, fill: AXIS, anchor: "middle",
  });
  scene.items.push({ kind: "text", x: x.pxLo, y: y.pxHi - 8, text: yLabel, size: 11, fill: AXIS, anchor: "start" });
}

function emptyAxes(scene: Scene, message: string, title?: string): Scene {
  const frame: Frame = {
    x: { lo: 0, hi: 1, pxLo: 60, pxHi: scene.width - 20 },
    y: { lo: 0, hi: 1, pxLo: scene.height - 50, pxHi: 40 },
  };
  drawFrame(scene, frame, "", "", [], []);
  scene.items.push({
    kind: "text", x: scene.width / 2, y: scene.height / 2, text: message,
    size: 12, fill: "#888888", anchor: "middle",
  });
  if (title) {
    scene.items.push({ kind: "text", x: scene.width / 2, y: 22, text: title, size: 13, fill: AXIS, anchor: "middle" });
  }
  scene.warnings.push(message);
  return scene;
}

export function renderRateSweep(table: Table, style: StyleOptions, path = "rate_sweep"): Scene {
  requireColumns(table, RATE_SWEEP_COLUMNS, path);
  const scene = makeScene(640, 480);
  const title = style.title ?? "Wireless loss vs transmission rate";
  if (table.rows.length === 0) {
    return emptyAxes(scene, "no data rows in " + path, title);
  }
  const rows = [...table.rows].sort(
    (a, b) => num(a, "rate_bits_per_symbol") - num(b, "rate_bits_per_symbol"),
  );
  const losses = rows.map((r) => num(r, "mean_wireless_loss"));
  const rates = rows.map((r) => num(r, "rate_bits_per_symbol"));
  const capacity = num(rows[0], "capacity_C");
  const capacityEps = num(rows[0], "capacity_eps");
  const lHat = num(rows[0], "L_hat");

  const [xLo, xHi] = padded(Math.min(...losses, lHat), Math.max(...losses, lHat));
  const [yLo, yHi] = padded(Math.min(...rates, capacity), Math.max(...rates, capacityEps));
  const frame: Frame = {
    x: { lo: xLo, hi: xHi, pxLo: 60, pxHi: 620 },
    y: { lo: yLo, hi: yHi, pxLo: 430, pxHi: 46 },
  };

  // shading: one horizontal band per in-region row, spanning that row's
  // half-gaps to its neighbours, so shaded rates are exactly the flagged ones
  if (style.regionShading) {
    for (let i = 0; i < rows.length; i++) {
      if (num(rows[i], "in_region") !== 1) continue;
      const lower = i === 0 ? rates[i] - 0.5 : (rates[i - 1] + rates[i]) / 2;
      const upper = i === rows.length - 1 ? rates[i] + 0.5 : (rates[i] + rates[i + 1]) / 2;
      const yTop = scale(frame.y, upper);
      const yBottom = scale(frame.y, lower);
      scene.items.push({
        kind: "rect", x: frame.x.pxLo, y: yTop, w: frame.x.pxHi - frame.x.pxLo,
        h: yBottom - yTop, fill: REGION, opacity: 0.35,
      });
    }
  }

  drawFrame(
    scene, frame, "mean wireless loss", "rate (bits/symbol)",
    ticks(xLo, xHi), ticks(yLo, yHi),
  );

  // capacity markers: horizontal lines at C and C_eps
  for (const [value, label, color] of [
    [capacity, `C = ${fmt(capacity)}`, "#555555"],
    [capacityEps, `C_eps = ${fmt(capacityEps)}`, "#d62728"],
  ] as Array<[number, string, string]>) {
    const py = scale(frame.y, value);
    scene.items.push({ kind: "line", x1: frame.x.pxLo, y1: py, x2: frame.x.pxHi, y2: py, stroke: color, width: 1.5, opacity: 0.9 });
    scene.items.push({ kind: "text", x: frame.x.pxHi - 4, y: py - 4, text: label, size: 10, fill: color, anchor: "end" });
  }
  // standard-risk marker: vertical line at L_hat
  const lx = scale(frame.x, lHat);
  scene.items.push({ kind: "line", x1: lx, y1: frame.y.pxLo, x2: lx, y2: frame.y.pxHi, stroke: "#777777", width: 1, opacity: 0.8 });
  scene.items.push({ kind: "text", x: lx + 4, y: frame.y.pxHi + 12, text: `L = ${fmt(lHat)}`, size: 10, fill: "#777777", anchor: "start" });

  const points = rows.map((r, i) => [scale(frame.x, losses[i]), scale(frame.y, rates[i])] as [number, number]);
  scene.items.push({ kind: "polyline", points, stroke: CURVE, width: 2 });
  for (const [px, py] of points) {
    scene.items.push({ kind: "circle", cx: px, cy: py, r: 3, fill: CURVE });
  }
  scene.items.push({ kind: "text", x: scene.width / 2, y: 22, text: title, size: 13, fill: AXIS, anchor: "middle" });
  return scene;
}

function groupMean(
  rows: Array<Record<string, string>>,
  keyColumn: string,
  xColumn: string,
  yColumn: string,
): Map<string, Array<[number, number]>> {
  const sums = new Map<string, Map<number, { total: number; count: number }>>();
  for (const row of rows) {
    const key = row[keyColumn];
    const x = num(row, xColumn);
    const y = num(row, yColumn);
    if (!sums.has(key)) sums.set(key, new Map());
    const inner = sums.get(key)!;
    if (!inner.has(x)) inner.set(x, { total: 0, count: 0 });
    const cell = inner.get(x)!;
    cell.total += y;
    cell.count += 1;
  }
  const out = new Map<string, Array<[number, number]>>();
  for (const [key, inner] of sums) {
    const series = [...inner.entries()]
      .map(([x, { total, count }]) => [x, total / count] as [number, number])
      .sort((a, b) => a[0] - b[0]);
    out.set(key, series);
  }
  return out;
}

function drawSeriesPanel(
  scene: Scene,
  frame: Frame,
  series: Map<string, Array<[number, number]>>,
  xLabel: string,
  yLabel: string,
): void {
  const xs: number[] = [];
  const ys: number[] = [];
  for (const points of series.values()) {
    for (const [x, y] of points) {
      xs.push(x);
      ys.push(y);
    }
  }
  const [xLo, xHi] = padded(Math.min(...xs), Math.max(...xs));
  const [yLo, yHi] = padded(Math.min(...ys, 0), Math.max(...ys));
  frame.x.lo = xLo;
  frame.x.hi = xHi;
  frame.y.lo = yLo;
  frame.y.hi = yHi;
  drawFrame(scene, frame, xLabel, yLabel, ticks(xLo, xHi, 4), ticks(yLo, yHi, 4));
  const methods = [...series.keys()].sort();
  methods.forEach((method, index) => {
    const color = methodColor(method, index);
    const points = series.get(method)!.map(
      ([x, y]) => [scale(frame.x, x), scale(frame.y, y)] as [number, number],
    );
    if (points.length > 1) {
      scene.items.push({ kind: "polyline", points, stroke: color, width: 2 });
    }
    for (const [px, py] of points) {
      scene.items.push({ kind: "circle", cx: px, cy: py, r: 2.5, fill: color });
    }
    scene.items.push({
      kind: "text", x: frame.x.pxLo + 8, y: frame.y.pxHi + 14 + 13 * index,
      text: method, size: 10, fill: color, anchor: "start",
    });
  });
}

export function renderTrainCompare(
  trace: Table,
  accuracy: Table,
  style: StyleOptions,
  tracePath = "train_trace",
  accuracyPath = "accuracy_vs_rate",
): Scene {
  requireColumns(trace, TRAIN_TRACE_COLUMNS, tracePath);
  requireColumns(accuracy, ACCURACY_RATE_COLUMNS, accuracyPath);
  const scene = makeScene(960, 440);
  const title = style.title ?? "Robust vs vanilla fine-tuning";
  if (trace.rows.length === 0 && accuracy.rows.length === 0) {
    return emptyAxes(scene, "no data rows", title);
  }
  const panels: Array<[Table, string, string, string, Frame]> = [
    [
      trace, "epoch", "mi_estimate", "MI estimate",
      { x: { lo: 0, hi: 1, pxLo: 60, pxHi: 458 }, y: { lo: 0, hi: 1, pxLo: 392, pxHi: 46 } },
    ],
    [
      accuracy, "rate_bits_per_symbol", "accuracy", "test accuracy",
      { x: { lo: 0, hi: 1, pxLo: 540, pxHi: 938 }, y: { lo: 0, hi: 1, pxLo: 392, pxHi: 46 } },
    ],
  ];
  const xLabels: Record<string, string> = {
    epoch: "epoch",
    rate_bits_per_symbol: "rate (bits/symbol)",
  };
  for (const [table, xColumn, yColumn, yLabel, frame] of panels) {
    if (table.rows.length === 0) {
      scene.warnings.push(`panel ${yLabel}: no data rows`);
      drawFrame(scene, frame, xLabels[xColumn], yLabel, [], []);
      continue;
    }
    const series = groupMean(table.rows, "method", xColumn, yColumn);
    drawSeriesPanel(scene, frame, series, xLabels[xColumn], yLabel);
  }
  scene.items.push({ kind: "text", x: scene.width / 2, y: 22, text: title, size: 13, fill: AXIS, anchor: "middle" });
  return scene;
}

const BOUND_DISPLAY: Array<[string, string]> = [
  ["channel", ""],
  ["g_hat", "g_hat"],
  ["g_bound", "G_hat"],
  ["p_e", "p_e"],
  ["accuracy", "acc"],
  ["ber", "ber"],
];

export function boundTableCells(table: Table): { header: string[]; body: string[][]; violations: boolean[] } {
  const header = BOUND_DISPLAY.map(([column, label]) => (label === "" ? "channel" : label));
  const body: string[][] = [];
  const violations: boolean[] = [];
  for (const row of table.rows) {
    const channel = `${row.channel_kind} ${fmt(num(row, "snr_db"))}dB ${row.scheme}`;
    body.push([
      channel,
      fmt(num(row, "g_hat"), 4),
      fmt(num(row, "g_bound"), 4),
      fmt(num(row, "p_e"), 4),
      fmt(num(row, "accuracy"), 4),
      fmt(num(row, "ber"), 4),
    ]);
    violations.push(num(row, "g_hat") > num(row, "g_bound"));
  }
  return { header, body, violations };
}

export function renderBoundTable(table: Table, style: StyleOptions, path = "bound_table"): Scene {
  requireColumns(table, BOUND_TABLE_COLUMNS, path);
  const { header, body, violations } = boundTableCells(table);
  const rowHeight = 26;
  const colWidths = [210, 90, 90, 80, 80, 80];
  const width = colWidths.reduce((a, b) => a + b, 0) + 40;
  const height = 70 + rowHeight * (body.length + 1) + 20;
  const scene = makeScene(width, height);
  const title = style.title ?? "Loss discrepancy vs upper bound";
  scene.items.push({ kind: "text", x: width / 2, y: 26, text: title, size: 13, fill: AXIS, anchor: "middle" });
  if (body.length === 0) {
    scene.warnings.push("no data rows in " + path);
  }
  const x0 = 20;
  const y0 = 50;
  const colX: number[] = [];
  let acc = x0;
  for (const w of colWidths) {
    colX.push(acc);
    acc += w;
  }
  // header band
  scene.items.push({ kind: "rect", x: x0, y: y0, w: width - 40, h: rowHeight, fill: "#e8e8e8" });
  header.forEach((label, c) => {
    scene.items.push({
      kind: "text", x: colX[c] + 6, y: y0 + 17, text: label, size: 11, fill: AXIS, anchor: "start",
    });
  });
  body.forEach((cells, r) => {
    const y = y0 + rowHeight * (r + 1);
    if (violations[r]) {
      scene.items.push({ kind: "rect", x: x0, y, w: width - 40, h: rowHeight, fill: "#f4cccc" });
    } else if (r % 2 === 1) {
      scene.items.push({ kind: "rect", x: x0, y, w: width - 40, h: rowHeight, fill: "#f7f7f7" });
    }
    cells.forEach((cell, c) => {
      scene.items.push({
        kind: "text", x: colX[c] + 6, y: y + 17, text: violations[r] && c === 1 ? cell + " !" : cell,
        size: 11, fill: violations[r] ? "#a00000" : AXIS, anchor: "start",
      });
    });
  });
  const yEnd = y0 + rowHeight * (body.length + 1);
  for (let r = 0; r <= body.length + 1; r++) {
    const y = y0 + rowHeight * r;
    scene.items.push({ kind: "line", x1: x0, y1: y, x2: width - 20, y2: y, stroke: "#bbbbbb", width: 1 });
  }
  scene.items.push({ kind: "line", x1: x0, y1: y0, x2: x0, y2: yEnd, stroke: "#bbbbbb", width: 1 });
  scene.items.push({ kind: "line", x1: width - 20, y1: y0, x2: width - 20, y2: yEnd, stroke: "#bbbbbb", width: 1 });
  return scene;
}

export function boundTableMarkdown(table: Table): string {
  requireColumns(table, BOUND_TABLE_COLUMNS, "bound_table");
  const { header, body, violations } = boundTableCells(table);
  const lines = [
    `| ${header.join(" | ")} |`,
    `| ${header.map(() => "---").join(" | ")} |`,
  ];
  body.forEach((cells, r) => {
    const marked = violations[r] ? cells.map((c) => `**${c}**`) : cells;
    lines.push(`| ${marked.join(" | ")} |`);
  });
  return lines.join("\n") + "\n";
}

export { SchemaError };
