import { mkdtempSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { beforeAll, describe, expect, it } from "vitest";

import {
  boundTableMarkdown,
  renderBoundTable,
  renderRateSweep,
  renderTrainCompare,
} from "../src/charts";
import { SchemaError, readTable } from "../src/csv";
import { Scene } from "../src/scene";

const GOLDEN = join(__dirname, "..", "..", "tests", "fixtures", "golden");

let dir: string;

beforeAll(() => {
  dir = mkdtempSync(join(tmpdir(), "wdl-plots-"));
});

function write(name: string, text: string): string {
  const path = join(dir, name);
  writeFileSync(path, text, "utf-8");
  return path;
}

const SWEEP_HEADER =
  "rate_bits_per_symbol,scheme,mean_wireless_loss,loss_std,in_region," +
  "L_hat,G_hat,p_e,capacity_C,capacity_eps,seed\n";

function sweepCsv(rows: Array<[number, string, number, number]>): string {
  // [rate, scheme, loss, in_region]
  const body = rows
    .map(
      ([rate, scheme, loss, inRegion]) =>
        `${rate},${scheme},${loss},0.01,${inRegion},0.02,0.1,0.1,5.68,6.31,1`,
    )
    .join("\n");
  return SWEEP_HEADER + body + (body ? "\n" : "");
}

function shadedRateIntervals(scene: Scene): Array<[number, number]> {
  // region bands are the only translucent rects
  return scene.items
    .filter((p) => p.kind === "rect" && p.opacity !== undefined)
    .map((p: any) => [p.y, p.y + p.h]);
}

describe("rate sweep chart", () => {
  it("renders the golden fixture without error", () => {
    const scene = renderRateSweep(readTable(join(GOLDEN, "rate_sweep.csv")), {
      regionShading: true,
    });
    expect(scene.warnings).toEqual([]);
    expect(scene.items.length).toBeGreaterThan(20);
  });

  it("shades exactly the in-region rows", () => {
    const path = write(
      "sweep.csv",
      sweepCsv([
        [1, "bpsk", 0.02, 1],
        [2, "qpsk", 0.03, 1],
        [4, "qam16", 0.3, 0],
        [6, "qam64", 0.05, 1], // non-contiguous region on purpose
        [8, "qam256", 0.6, 0],
      ]),
    );
    const table = readTable(path);
    const scene = renderRateSweep(table, { regionShading: true });
    const bands = shadedRateIntervals(scene);
    expect(bands.length).toBe(3);

    // rate -> pixel mapping recovered from the drawn data points
    const points = scene.items.filter((p) => p.kind === "circle") as any[];
    const rates = [1, 2, 4, 6, 8];
    const inRegion = [1, 1, 0, 1, 0];
    const sortedY = points.map((p) => p.cy);
    rates.forEach((_, i) => {
      const covered = bands.some(
        ([top, bottom]) => sortedY[i] >= top - 1e-9 && sortedY[i] <= bottom + 1e-9,
      );
      expect(covered).toBe(inRegion[i] === 1);
    });
  });

  it("omits shading when the toggle is off", () => {
    const path = write("sweep2.csv", sweepCsv([[1, "bpsk", 0.02, 1], [2, "qpsk", 0.03, 1]]));
    const scene = renderRateSweep(readTable(path), { regionShading: false });
    expect(shadedRateIntervals(scene).length).toBe(0);
  });

  it("renders empty axes with a warning for a header-only csv", () => {
    const path = write("empty.csv", SWEEP_HEADER);
    const scene = renderRateSweep(readTable(path), { regionShading: true });
    expect(scene.warnings.length).toBe(1);
    expect(scene.warnings[0]).toContain("no data rows");
  });

  it("names missing columns in schema errors", () => {
    const path = write("bad.csv", "rate_bits_per_symbol,scheme\n1,bpsk\n");
    expect(() => renderRateSweep(readTable(path), { regionShading: true })).toThrow(
      /missing column.*mean_wireless_loss/,
    );
  });
});

const TRACE_HEADER = "epoch,method,mi_estimate,test_accuracy,eta,beta,seed\n";
const ACC_HEADER = "method,rate_bits_per_symbol,scheme,accuracy,seed\n";

describe("train compare chart", () => {
  it("renders the golden fixtures without error", () => {
    const scene = renderTrainCompare(
      readTable(join(GOLDEN, "train_trace.csv")),
      readTable(join(GOLDEN, "accuracy_vs_rate.csv")),
      { regionShading: true },
    );
    expect(scene.warnings).toEqual([]);
  });

  it("draws one line per method", () => {
    const trace = write(
      "trace.csv",
      TRACE_HEADER +
        "0,robust,1.0,0.9,0.01,0.1,1\n1,robust,0.5,0.92,0.01,0.09,1\n" +
        "0,vanilla,1.2,0.88,0.001,0,1\n1,vanilla,0.8,0.9,0.001,0,1\n",
    );
    const acc = write(
      "acc.csv",
      ACC_HEADER + "robust,2,qpsk,0.95,1\nrobust,4,qam16,0.9,1\n" +
        "vanilla,2,qpsk,0.94,1\nvanilla,4,qam16,0.85,1\n",
    );
    const scene = renderTrainCompare(readTable(trace), readTable(acc), { regionShading: true });
    const lines = scene.items.filter((p) => p.kind === "polyline");
    expect(lines.length).toBe(4); // two panels x two methods
  });

  it("handles a single-method csv with one line", () => {
    const trace = write(
      "trace1.csv",
      TRACE_HEADER + "0,robust,1.0,0.9,0.01,0.1,1\n1,robust,0.5,0.92,0.01,0.09,1\n",
    );
    const acc = write("acc1.csv", ACC_HEADER + "robust,2,qpsk,0.95,1\nrobust,4,qam16,0.9,1\n");
    const scene = renderTrainCompare(readTable(trace), readTable(acc), { regionShading: true });
    expect(scene.items.filter((p) => p.kind === "polyline").length).toBe(2);
  });

  it("rejects a trace without the method column", () => {
    const trace = write("nomethod.csv", "epoch,mi_estimate\n0,1.0\n");
    const acc = write("acc2.csv", ACC_HEADER + "robust,2,qpsk,0.95,1\n");
    expect(() =>
      renderTrainCompare(readTable(trace), readTable(acc), { regionShading: true }),
    ).toThrow(SchemaError);
    expect(() =>
      renderTrainCompare(readTable(trace), readTable(acc), { regionShading: true }),
    ).toThrow(/method/);
  });

  it("averages across seeds into a single line per method", () => {
    const trace = write(
      "trace3.csv",
      TRACE_HEADER +
        "0,robust,1.0,0.9,0.01,0.1,1\n0,robust,3.0,0.9,0.01,0.1,2\n" +
        "1,robust,0.5,0.9,0.01,0.1,1\n1,robust,1.5,0.9,0.01,0.1,2\n",
    );
    const acc = write("acc3.csv", ACC_HEADER + "robust,2,qpsk,0.95,1\nrobust,2,qpsk,0.85,2\n");
    const scene = renderTrainCompare(readTable(trace), readTable(acc), { regionShading: true });
    expect(scene.items.filter((p) => p.kind === "polyline").length).toBe(1);
    // right panel has a single averaged point at accuracy 0.9
    const circles = scene.items.filter((p) => p.kind === "circle") as any[];
    expect(circles.length).toBe(3); // two trace epochs + one accuracy point
  });
});

const BOUND_HEADER =
  "channel_kind,snr_db,scheme,n_draws,standard_risk,g_hat,g_signed,sigma," +
  "mi_estimate,g_bound,subgamma_bound,p_e,accuracy,ber,seed\n";

describe("bound table", () => {
  it("renders the golden fixture without error", () => {
    const scene = renderBoundTable(readTable(join(GOLDEN, "bound_table.csv")), {
      regionShading: true,
    });
    expect(scene.warnings).toEqual([]);
  });

  it("renders header-only output for an empty csv", () => {
    const path = write("bound_empty.csv", BOUND_HEADER);
    const scene = renderBoundTable(readTable(path), { regionShading: true });
    expect(scene.warnings[0]).toContain("no data rows");
    const texts = scene.items.filter((p) => p.kind === "text") as any[];
    expect(texts.some((t) => t.text === "G_hat")).toBe(true);
  });

  it("highlights violating rows", () => {
    const path = write(
      "bound_bad.csv",
      BOUND_HEADER +
        "awgn,5,qpsk,20,0.1,0.5,0.4,2.0,0.01,0.2,0.3,0.1,0.9,0.03,1\n" +
        "awgn,10,qam16,20,0.1,0.01,0.0,2.0,0.01,0.2,0.3,0.0,0.99,0.01,1\n",
    );
    const scene = renderBoundTable(readTable(path), { regionShading: true });
    const highlight = scene.items.filter(
      (p) => p.kind === "rect" && (p as any).fill === "#f4cccc",
    );
    expect(highlight.length).toBe(1);
    const markdown = boundTableMarkdown(readTable(path));
    expect(markdown.split("\n")[2]).toContain("**");
    expect(markdown.split("\n")[3]).not.toContain("**");
  });
});
