/** CSV loading and schema checks for the harness output files. */

import * as fs from "fs";
import Papa from "papaparse";

export type Row = Record<string, string>;

export interface Table {
  columns: string[];
  rows: Row[];
}

export class SchemaError extends Error {}

export const RATE_SWEEP_COLUMNS = [
  "rate_bits_per_symbol", "scheme", "mean_wireless_loss", "loss_std",
  "in_region", "L_hat", "G_hat", "p_e", "capacity_C", "capacity_eps", "seed",
];

export const BOUND_TABLE_COLUMNS = [
  "channel_kind", "snr_db", "scheme", "n_draws", "standard_risk", "g_hat",
  "g_signed", "sigma", "mi_estimate", "g_bound", "subgamma_bound", "p_e",
  "accuracy", "ber", "seed",
];

export const TRAIN_TRACE_COLUMNS = [
  "epoch", "method", "mi_estimate", "test_accuracy", "eta", "beta", "seed",
];

export const ACCURACY_RATE_COLUMNS = [
  "method", "rate_bits_per_symbol", "scheme", "accuracy", "seed",
];

export function readTable(path: string): Table {
  const text = fs.readFileSync(path, "utf-8");
  const parsed = Papa.parse<Row>(text, { header: true, skipEmptyLines: true });
  const fatal = parsed.errors.filter((e) => e.code !== "TooFewFields");
  if (fatal.length > 0 && parsed.data.length === 0 && !parsed.meta.fields) {
    throw new SchemaError(`cannot parse ${path}: ${fatal[0].message}`);
  }
  return { columns: parsed.meta.fields ?? [], rows: parsed.data };
}

/** Check that every declared column is present; name the missing ones. */
export function requireColumns(table: Table, required: string[], path: string): void {
  const have = new Set(table.columns);
  const missing = required.filter((c) => !have.has(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `${path} does not match the expected schema: missing column(s) ${missing.join(", ")}`,
    );
  }
}

export function num(row: Row, column: string): number {
  const value = Number(row[column]);
  if (Number.isNaN(value)) {
    throw new SchemaError(`column ${column} holds a non-numeric value: ${row[column]}`);
  }
  return value;
}
