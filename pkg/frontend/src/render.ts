/** Figure dispatch: read the input CSV(s), build the scene, write PNG and
 * SVG (and a markdown table for the bound-table kind). Inputs are opened
 * read-only; identical inputs and style produce identical output bytes. */

import * as fs from "fs";
import * as path from "path";
import {
  StyleOptions,
  boundTableMarkdown,
  renderBoundTable,
  renderRateSweep,
  renderTrainCompare,
} from "./charts";
import { readTable } from "./csv";
import { sceneToPng } from "./raster";
import { Scene } from "./scene";
import { sceneToSvg } from "./svg";

export type FigureKind = "bound-table" | "rate-sweep" | "train-compare";

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  out: string;
  style: StyleOptions;
}

export interface RenderResult {
  svgPath: string;
  pngPath: string;
  markdownPath?: string;
  warnings: string[];
}

function outputBase(out: string): string {
  const ext = path.extname(out).toLowerCase();
  return ext === ".png" || ext === ".svg" ? out.slice(0, -ext.length) : out;
}

export function buildScene(spec: FigureSpec): Scene {
  switch (spec.kind) {
    case "rate-sweep": {
      if (spec.inputs.length !== 1) {
        throw new Error("rate-sweep takes exactly one input CSV");
      }
      return renderRateSweep(readTable(spec.inputs[0]), spec.style, spec.inputs[0]);
    }
    case "bound-table": {
      if (spec.inputs.length !== 1) {
        throw new Error("bound-table takes exactly one input CSV");
      }
      return renderBoundTable(readTable(spec.inputs[0]), spec.style, spec.inputs[0]);
    }
    case "train-compare": {
      if (spec.inputs.length !== 2) {
        throw new Error(
          "train-compare takes two input CSVs: the training trace and the accuracy-vs-rate table",
        );
      }
      return renderTrainCompare(
        readTable(spec.inputs[0]),
        readTable(spec.inputs[1]),
        spec.style,
        spec.inputs[0],
        spec.inputs[1],
      );
    }
  }
}

export function renderFigure(spec: FigureSpec): RenderResult {
  const scene = buildScene(spec);
  const base = outputBase(spec.out);
  fs.mkdirSync(path.dirname(path.resolve(base)), { recursive: true });
  const svgPath = base + ".svg";
  const pngPath = base + ".png";
  fs.writeFileSync(svgPath, sceneToSvg(scene), "utf-8");
  fs.writeFileSync(pngPath, sceneToPng(scene));
  const result: RenderResult = { svgPath, pngPath, warnings: scene.warnings };
  if (spec.kind === "bound-table") {
    const markdownPath = base + ".md";
    fs.writeFileSync(markdownPath, boundTableMarkdown(readTable(spec.inputs[0])), "utf-8");
    result.markdownPath = markdownPath;
  }
  return result;
}
