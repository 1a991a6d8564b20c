#!/usr/bin/env node
/**
 * Render a figure from drive-diagnostics CSV files.
 *
 *   fibdrive-plot --kind decay --input runs/trace_distance_k2_m1.csv \
 *       --output decay.svg --bound 0.0447
 *   fibdrive-plot --kind heatmap --input runs/gamma_map_k2.csv --output map.svg
 *   fibdrive-plot --kind deeptherm --input runs/deep_therm_L12_k1.csv \
 *       --output dt.svg --reference 0.026
 */

import { parseArgs } from "node:util";

import { render, FigureKind } from "./figures.js";

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        kind: { type: "string" },
        input: { type: "string", multiple: true },
        output: { type: "string" },
        bound: { type: "string" },
        reference: { type: "string", multiple: true },
        label: { type: "string", multiple: true },
        title: { type: "string" },
        "x-range": { type: "string" },
        "y-range": { type: "string" },
      },
    });
  } catch (err) {
    console.error(`argument error: ${(err as Error).message}`);
    return 2;
  }
  const v = parsed.values;
  if (!v.kind || !v.input || !v.output) {
    console.error(
      "usage: fibdrive-plot --kind decay|heatmap|deeptherm " +
        "--input data.csv [--input more.csv] --output figure.svg " +
        "[--bound B] [--reference R]... [--label L]... [--title T] " +
        "[--x-range lo:hi] [--y-range lo:hi]",
    );
    return 2;
  }
  const parseRange = (s?: string): [number, number] | undefined => {
    if (!s) return undefined;
    const [lo, hi] = s.split(":").map(Number);
    if (!Number.isFinite(lo) || !Number.isFinite(hi)) {
      throw new Error(`bad range "${s}", expected lo:hi`);
    }
    return [lo, hi];
  };
  try {
    const out = render({
      kind: v.kind as FigureKind,
      inputs: v.input,
      output: v.output,
      bound: v.bound === undefined ? undefined : Number(v.bound),
      references: v.reference?.map(Number),
      labels: v.label,
      title: v.title,
      xRange: parseRange(v["x-range"]),
      yRange: parseRange(v["y-range"]),
    });
    console.log(out);
    return 0;
  } catch (err) {
    console.error(`render error: ${(err as Error).message}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
