/**
 * rotorbath-plots: render a rotorbath CLI output directory into SVG figures.
 *
 * Usage:
 *   node dist/cli.js fig2 --input <dir> [--outdir <dir>] [--dump-verify]
 *   node dist/cli.js fig3 --input <dir> [--outdir <dir>] [--dump-verify]
 *
 * Exit codes: 0 success, 2 bad arguments or missing/ill-formed inputs.
 */

import { mkdirSync, writeFileSync } from "fs";
import path from "path";

import { PlotInputError } from "./csv.js";
import { renderFig2 } from "./fig2.js";
import { renderFig3 } from "./fig3.js";
import { VerifyReport } from "./verify.js";

export interface PlotSpec {
  figure: "fig2" | "fig3";
  input: string;
  outdir: string;
  format: "svg";
  dumpVerify: boolean;
}

export function parseArgs(argv: string[]): PlotSpec {
  const [figure, ...rest] = argv;
  if (figure !== "fig2" && figure !== "fig3") {
    throw new PlotInputError(`expected figure 'fig2' or 'fig3', got '${figure ?? ""}'`);
  }
  let input = "";
  let outdir = "";
  let format = "svg";
  let dumpVerify = false;
  for (let i = 0; i < rest.length; i++) {
    const a = rest[i];
    if (a === "--input") input = rest[++i] ?? "";
    else if (a === "--outdir") outdir = rest[++i] ?? "";
    else if (a === "--format") format = rest[++i] ?? "";
    else if (a === "--dump-verify") dumpVerify = true;
    else throw new PlotInputError(`unknown argument '${a}'`);
  }
  if (!input) throw new PlotInputError("--input <dir> is required");
  if (format !== "svg") {
    throw new PlotInputError(`unsupported format '${format}' (svg only)`);
  }
  return {
    figure,
    input,
    outdir: outdir || `${input}-plots`,
    format: "svg",
    dumpVerify,
  };
}

export function render(spec: PlotSpec): { written: string[]; verify: VerifyReport } {
  const verify = new VerifyReport();
  const images =
    spec.figure === "fig2" ? renderFig2(spec.input, verify) : renderFig3(spec.input, verify);
  mkdirSync(spec.outdir, { recursive: true });
  const written: string[] = [];
  for (const name of Object.keys(images).sort()) {
    const file = path.join(spec.outdir, name);
    writeFileSync(file, images[name]);
    written.push(file);
  }
  return { written, verify };
}

export function main(argv: string[]): number {
  let spec: PlotSpec;
  try {
    spec = parseArgs(argv);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
  try {
    const { written, verify } = render(spec);
    if (spec.dumpVerify) {
      console.log(verify.toJSON(spec.figure));
    }
    for (const f of written) console.error(`wrote ${f}`);
    return 0;
  } catch (err) {
    if (err instanceof PlotInputError) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${path.resolve(process.argv[1])}`).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
