/** Bookkeeping of everything a render touched, for --dump-verify: the
 * numeric extrema of each input column pass through unaltered so they can
 * be diffed against the CSV files exactly. */

import { Extrema } from "./csv.js";

export class VerifyReport {
  readonly files: Record<string, Record<string, Extrema>> = {};

  add(file: string, columns: Record<string, Extrema>): void {
    this.files[file] = columns;
  }

  toJSON(figure: string): string {
    const ordered: Record<string, Record<string, Extrema>> = {};
    for (const name of Object.keys(this.files).sort()) {
      ordered[name] = this.files[name];
    }
    return JSON.stringify({ figure, inputs: ordered }, null, 2);
  }
}
