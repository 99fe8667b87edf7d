#!/usr/bin/env node
/** wdl-plots <kind> --in <csv> [--in <csv>] --out <img>
 *
 * Kinds: bound-table | rate-sweep | train-compare (which takes two --in
 * files: train_trace.csv and accuracy_vs_rate.csv). Writes <out>.png and
 * <out>.svg; bound-table also writes <out>.md.
 */

import { SchemaError } from "./csv";
import { FigureKind, renderFigure } from "./render";

const KINDS: FigureKind[] = ["bound-table", "rate-sweep", "train-compare"];

interface CliArgs {
  kind: FigureKind;
  inputs: string[];
  out: string;
  title?: string;
  regionShading: boolean;
}

export function parseArgs(argv: string[]): CliArgs {
  if (argv.length === 0) {
    throw new Error(`usage: wdl-plots <${KINDS.join("|")}> --in <csv> --out <img>`);
  }
  const [kind, ...rest] = argv;
  if (!KINDS.includes(kind as FigureKind)) {
    throw new Error(`unknown figure kind ${kind}; expected one of ${KINDS.join(", ")}`);
  }
  const inputs: string[] = [];
  let out: string | undefined;
  let title: string | undefined;
  let regionShading = true;
  for (let i = 0; i < rest.length; i++) {
    const flag = rest[i];
    switch (flag) {
      case "--in":
        inputs.push(rest[++i]);
        break;
      case "--out":
        out = rest[++i];
        break;
      case "--title":
        title = rest[++i];
        break;
      case "--no-region":
        regionShading = false;
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  if (inputs.length === 0 || inputs.some((value) => value === undefined)) {
    throw new Error("--in <csv> is required");
  }
  if (!out) {
    throw new Error("--out <img> is required");
  }
  return { kind: kind as FigureKind, inputs, out, title, regionShading };
}

export function main(argv: string[]): number {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (error) {
    console.error(`error: ${(error as Error).message}`);
    return 2;
  }
  try {
    const result = renderFigure({
      kind: args.kind,
      inputs: args.inputs,
      out: args.out,
      style: { title: args.title, regionShading: args.regionShading },
    });
    for (const warning of result.warnings) console.warn(`warning: ${warning}`);
    const written = [result.pngPath, result.svgPath, result.markdownPath].filter(Boolean);
    console.log(`wrote ${written.join(", ")}`);
    return 0;
  } catch (error) {
    if (error instanceof SchemaError) {
      console.error(`error: ${error.message}`);
      return 2;
    }
    console.error(`error: ${(error as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
