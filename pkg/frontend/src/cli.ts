#!/usr/bin/env node
/**
 * Render one figure from run-output CSVs:
 *
 *   tpmspread-plot --kind complexity_vs_u --input "runs/case3/complexity_tau=*.csv" --out fig.svg
 */

import { parseArgs } from "node:util";

import { FigureKind, render } from "./figures.js";

const KINDS: FigureKind[] = [
  "complexity_vs_u",
  "bn_scatter",
  "ipr_vs_tau",
  "b1_vs_tau",
  "bn_ratio_hist",
];

export function main(argv: string[]): number {
  let values;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        kind: { type: "string" },
        input: { type: "string" },
        out: { type: "string" },
        bins: { type: "string" },
      },
    }));
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  const kind = values.kind as FigureKind | undefined;
  if (!kind || !KINDS.includes(kind)) {
    console.error(`--kind must be one of: ${KINDS.join(", ")}`);
    return 2;
  }
  if (!values.input || !values.out) {
    console.error("--input and --out are required");
    return 2;
  }
  const bins = values.bins === undefined ? undefined : Number(values.bins);
  if (bins !== undefined && (!Number.isInteger(bins) || bins < 1)) {
    console.error("--bins must be a positive integer");
    return 2;
  }
  try {
    render({ inputGlob: values.input, figureKind: kind, outputPath: values.out, bins });
  } catch (err) {
    console.error((err as Error).message);
    return 1;
  }
  console.log(`wrote ${values.out}`);
  return 0;
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
