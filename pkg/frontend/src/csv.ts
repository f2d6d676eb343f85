/**
 * Minimal CSV reading for rotorbath output directories.
 *
 * Files are plain comma-separated numeric tables with a single header row;
 * malformed rows are reported with file name and row number.
 */

import { readFileSync, existsSync } from "fs";
import path from "path";

export class PlotInputError extends Error {}

export interface Table {
  file: string;
  columns: string[];
  /** column name -> values */
  data: Record<string, number[]>;
  rows: number;
}

export function readTable(dir: string, name: string): Table {
  const file = path.join(dir, name);
  if (!existsSync(file)) {
    throw new PlotInputError(`missing input file ${name} in ${dir}`);
  }
  const lines = readFileSync(file, "utf8").trim().split(/\r?\n/);
  if (lines.length < 2) {
    throw new PlotInputError(`${name}: no data rows`);
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  const data: Record<string, number[]> = {};
  for (const c of columns) data[c] = [];
  for (let r = 1; r < lines.length; r++) {
    const parts = lines[r].split(",");
    if (parts.length !== columns.length) {
      throw new PlotInputError(
        `${name}: row ${r + 1}: expected ${columns.length} fields, got ${parts.length}`,
      );
    }
    for (let c = 0; c < columns.length; c++) {
      const v = Number(parts[c]);
      if (Number.isNaN(v) && parts[c].trim() !== "nan") {
        throw new PlotInputError(`${name}: row ${r + 1}: non-numeric field '${parts[c]}'`);
      }
      data[columns[c]].push(v);
    }
  }
  return { file: name, columns, data, rows: lines.length - 1 };
}

export interface Extrema {
  min: number;
  max: number;
}

export function extrema(values: number[]): Extrema {
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (Number.isNaN(v)) continue;
    if (v < min) min = v;
    if (v > max) max = v;
  }
  return { min, max };
}

/** Extrema of every column of a table, for --dump-verify. */
export function tableExtrema(table: Table): Record<string, Extrema> {
  const out: Record<string, Extrema> = {};
  for (const c of table.columns) out[c] = extrema(table.data[c]);
  return out;
}
