/**
 * Figure renderers for the drive-diagnostics CSV files.
 *
 * Three kinds:
 *  - "decay":    log-log trace-distance curves with a dashed horizontal
 *                bound line (the stationary-dynamics floor B(d));
 *  - "heatmap":  decay-exponent maps over a (theta1, theta2) angle grid;
 *  - "deeptherm": projected-ensemble distance over time, log y-axis,
 *                with optional dashed reference plateaus.
 *
 * Every science number is read from the CSVs or passed in explicitly;
 * rendering performs no computation beyond axis transforms.
 */

import { writeFileSync } from "node:fs";
import { basename } from "node:path";

import { column, readCsv, numericColumn } from "./csv.js";
import { extent, linearScale, logScale, formatTick, Scale } from "./scale.js";
import {
  document as svgDocument,
  el,
  heatColor,
  polyline,
  round,
  SERIES_COLORS,
} from "./svg.js";

export type FigureKind = "decay" | "heatmap" | "deeptherm";

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  output: string;
  /** dashed horizontal reference: the bound for decay figures, the
   *  Haar plateau(s) for deep-thermalization figures */
  bound?: number;
  references?: number[];
  labels?: string[];
  title?: string;
  xRange?: [number, number];
  yRange?: [number, number];
  width?: number;
  height?: number;
}

const MARGIN = { left: 64, right: 20, top: 28, bottom: 46 };

export function render(spec: FigureSpec): string {
  if (spec.inputs.length === 0) throw new Error("no input CSV files given");
  let svg: string;
  if (spec.kind === "decay") svg = renderDecay(spec);
  else if (spec.kind === "heatmap") svg = renderHeatmap(spec);
  else if (spec.kind === "deeptherm") svg = renderDeepTherm(spec);
  else throw new Error(`unknown figure kind "${String(spec.kind)}"`);
  writeFileSync(spec.output, svg, "utf-8");
  return spec.output;
}

interface Series {
  label: string;
  xs: number[];
  ys: number[];
}

function loadSeries(
  spec: FigureSpec,
  xCol: string,
  yCol: string,
): Series[] {
  return spec.inputs.map((path, i) => {
    const table = readCsv(path);
    if (table.rows.length === 0) throw new Error(`empty input: ${path}`);
    return {
      label: spec.labels?.[i] ?? basename(path).replace(/\.csv$/, ""),
      xs: numericColumn(table, xCol),
      ys: numericColumn(table, yCol),
    };
  });
}

function frame(
  spec: FigureSpec,
  x: Scale,
  y: Scale,
  xLabel: string,
  yLabel: string,
  xLog: boolean,
): string[] {
  const w = spec.width ?? 560;
  const h = spec.height ?? 400;
  const parts: string[] = [];
  parts.push(
    el("rect", {
      x: MARGIN.left,
      y: MARGIN.top,
      width: w - MARGIN.left - MARGIN.right,
      height: h - MARGIN.top - MARGIN.bottom,
      fill: "none",
      stroke: "#333",
      "stroke-width": 1,
    }),
  );
  for (const t of x.ticks()) {
    const px = round(x(t));
    parts.push(
      el("line", {
        x1: px,
        y1: h - MARGIN.bottom,
        x2: px,
        y2: h - MARGIN.bottom + 5,
        stroke: "#333",
      }),
      el(
        "text",
        { x: px, y: h - MARGIN.bottom + 18, "text-anchor": "middle", "font-size": 11 },
        [],
        formatTick(t),
      ),
    );
  }
  for (const t of y.ticks()) {
    const py = round(y(t));
    parts.push(
      el("line", {
        x1: MARGIN.left - 5,
        y1: py,
        x2: MARGIN.left,
        y2: py,
        stroke: "#333",
      }),
      el(
        "text",
        { x: MARGIN.left - 8, y: py + 4, "text-anchor": "end", "font-size": 11 },
        [],
        formatTick(t),
      ),
    );
  }
  parts.push(
    el(
      "text",
      { x: (MARGIN.left + w - MARGIN.right) / 2, y: h - 8, "text-anchor": "middle", "font-size": 12 },
      [],
      xLabel,
    ),
    el(
      "text",
      {
        x: 16,
        y: (MARGIN.top + h - MARGIN.bottom) / 2,
        "text-anchor": "middle",
        "font-size": 12,
        transform: `rotate(-90 16 ${(MARGIN.top + h - MARGIN.bottom) / 2})`,
      },
      [],
      yLabel,
    ),
  );
  if (spec.title) {
    parts.push(
      el(
        "text",
        { x: w / 2, y: 18, "text-anchor": "middle", "font-size": 13, "font-weight": "bold" },
        [],
        spec.title,
      ),
    );
  }
  return parts;
}

function positive(values: number[]): number[] {
  return values.filter((v) => v > 0);
}

export function renderDecay(spec: FigureSpec): string {
  const series = loadSeries(spec, "t", "delta");
  const w = spec.width ?? 560;
  const h = spec.height ?? 400;
  const allX = series.flatMap((s) => positive(s.xs));
  const allY = series.flatMap((s) => positive(s.ys));
  if (spec.bound !== undefined) allY.push(spec.bound);
  const xr = spec.xRange ?? extent(allX);
  const yr = spec.yRange ?? extent(allY);
  const x = logScale(xr, [MARGIN.left, w - MARGIN.right]);
  const y = logScale(yr, [h - MARGIN.bottom, MARGIN.top]);
  const parts = frame(spec, x, y, "time t", "trace distance", true);
  series.forEach((s, i) => {
    const pts: Array<[number, number]> = [];
    for (let j = 0; j < s.xs.length; j++) {
      if (s.xs[j] > 0 && s.ys[j] > 0) pts.push([x(s.xs[j]), y(s.ys[j])]);
    }
    parts.push(polyline(pts, SERIES_COLORS[i % SERIES_COLORS.length]));
    parts.push(
      el(
        "text",
        {
          x: w - MARGIN.right - 6,
          y: MARGIN.top + 16 + 14 * i,
          "text-anchor": "end",
          "font-size": 11,
          fill: SERIES_COLORS[i % SERIES_COLORS.length],
        },
        [],
        s.label,
      ),
    );
  });
  if (spec.bound !== undefined) {
    const py = round(y(spec.bound));
    parts.push(
      el("line", {
        x1: MARGIN.left,
        y1: py,
        x2: w - MARGIN.right,
        y2: py,
        stroke: "black",
        "stroke-width": 1.2,
        "stroke-dasharray": "6 4",
      }),
      el(
        "text",
        { x: MARGIN.left + 6, y: py - 5, "font-size": 11 },
        [],
        `bound ${formatTick(spec.bound)}`,
      ),
    );
  }
  return svgDocument(w, h, parts);
}

export function renderHeatmap(spec: FigureSpec): string {
  const table = readCsv(spec.inputs[0]);
  if (table.rows.length === 0) throw new Error(`empty input: ${spec.inputs[0]}`);
  const t1 = numericColumn(table, "theta1");
  const t2 = numericColumn(table, "theta2");
  // flagged grid points carry non-finite gamma; they render grey
  const gamma = column(table, "gamma").map(Number);
  if (!gamma.some((g) => Number.isFinite(g))) {
    throw new Error("no finite gamma values to map");
  }
  const xs = [...new Set(t1)].sort((a, b) => a - b);
  const ys = [...new Set(t2)].sort((a, b) => a - b);
  const w = spec.width ?? 560;
  const h = spec.height ?? 480;
  const plotW = w - MARGIN.left - MARGIN.right - 56; // room for the colorbar
  const plotH = h - MARGIN.top - MARGIN.bottom;
  const finite = gamma.filter((g) => Number.isFinite(g));
  const [gLo, gHi] = extent(finite);
  const span = gHi - gLo || 1;
  const cellW = plotW / xs.length;
  const cellH = plotH / ys.length;
  const parts: string[] = [];
  for (let r = 0; r < t1.length; r++) {
    const xi = xs.indexOf(t1[r]);
    const yi = ys.indexOf(t2[r]);
    const g = gamma[r];
    const fill = Number.isFinite(g) ? heatColor((g - gLo) / span) : "#bbbbbb";
    parts.push(
      el("rect", {
        x: round(MARGIN.left + xi * cellW),
        y: round(MARGIN.top + plotH - (yi + 1) * cellH),
        width: round(cellW + 0.5),
        height: round(cellH + 0.5),
        fill,
      }),
    );
  }
  // colorbar
  const barX = w - MARGIN.right - 36;
  const steps = 48;
  for (let i = 0; i < steps; i++) {
    parts.push(
      el("rect", {
        x: barX,
        y: round(MARGIN.top + plotH - ((i + 1) * plotH) / steps),
        width: 14,
        height: round(plotH / steps + 0.5),
        fill: heatColor(i / (steps - 1)),
      }),
    );
  }
  parts.push(
    el("text", { x: barX + 18, y: MARGIN.top + plotH, "font-size": 10 }, [], formatTick(gLo)),
    el("text", { x: barX + 18, y: MARGIN.top + 8, "font-size": 10 }, [], formatTick(gHi)),
    el("text", { x: barX, y: MARGIN.top - 8, "font-size": 11 }, [], "gamma"),
  );
  parts.push(
    el(
      "text",
      { x: MARGIN.left + plotW / 2, y: h - 10, "text-anchor": "middle", "font-size": 12 },
      [],
      "theta1 (rad)",
    ),
    el(
      "text",
      {
        x: 16,
        y: MARGIN.top + plotH / 2,
        "text-anchor": "middle",
        "font-size": 12,
        transform: `rotate(-90 16 ${MARGIN.top + plotH / 2})`,
      },
      [],
      "theta2 (rad)",
    ),
  );
  for (const [i, v] of [0, xs.length - 1].entries()) {
    parts.push(
      el(
        "text",
        {
          x: round(MARGIN.left + (v + 0.5) * cellW),
          y: h - MARGIN.bottom + 16,
          "text-anchor": "middle",
          "font-size": 10,
        },
        [],
        formatTick(xs[v]),
      ),
    );
  }
  if (spec.title) {
    parts.push(
      el(
        "text",
        { x: w / 2, y: 16, "text-anchor": "middle", "font-size": 13, "font-weight": "bold" },
        [],
        spec.title,
      ),
    );
  }
  return svgDocument(w, h, parts);
}

export function renderDeepTherm(spec: FigureSpec): string {
  const series = loadSeries(spec, "t", "delta_E");
  const w = spec.width ?? 560;
  const h = spec.height ?? 400;
  const allY = series.flatMap((s) => positive(s.ys));
  for (const r of spec.references ?? []) allY.push(r);
  const xr = spec.xRange ?? extent(series.flatMap((s) => s.xs));
  const yr = spec.yRange ?? extent(allY);
  const x = linearScale(xr, [MARGIN.left, w - MARGIN.right]);
  const y = logScale(yr, [h - MARGIN.bottom, MARGIN.top]);
  const parts = frame(spec, x, y, "time t", "projected-ensemble distance", false);
  series.forEach((s, i) => {
    const pts: Array<[number, number]> = [];
    for (let j = 0; j < s.xs.length; j++) {
      if (s.ys[j] > 0) pts.push([x(s.xs[j]), y(s.ys[j])]);
    }
    parts.push(polyline(pts, SERIES_COLORS[i % SERIES_COLORS.length]));
    parts.push(
      el(
        "text",
        {
          x: w - MARGIN.right - 6,
          y: MARGIN.top + 16 + 14 * i,
          "text-anchor": "end",
          "font-size": 11,
          fill: SERIES_COLORS[i % SERIES_COLORS.length],
        },
        [],
        s.label,
      ),
    );
  });
  (spec.references ?? []).forEach((r, i) => {
    const py = round(y(r));
    parts.push(
      el("line", {
        x1: MARGIN.left,
        y1: py,
        x2: w - MARGIN.right,
        y2: py,
        stroke: SERIES_COLORS[i % SERIES_COLORS.length],
        "stroke-width": 1,
        "stroke-dasharray": "5 4",
      }),
    );
  });
  return svgDocument(w, h, parts);
}
