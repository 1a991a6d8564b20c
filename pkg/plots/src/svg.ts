/** Tiny deterministic SVG assembly: text in, text out, no DOM. */

export function el(
  tag: string,
  attrs: Record<string, string | number>,
  children: string[] = [],
  text?: string,
): string {
  const a = Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${String(v)}"`)
    .join("");
  if (children.length === 0 && text === undefined) return `<${tag}${a}/>`;
  return `<${tag}${a}>${escapeText(text ?? "")}${children.join("")}</${tag}>`;
}

function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function document(
  width: number,
  height: number,
  children: string[],
): string {
  return [
    '<?xml version="1.0" encoding="UTF-8"?>',
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
    el("rect", { x: 0, y: 0, width, height, fill: "white" }),
    ...children,
    "</svg>",
  ].join("\n");
}

export function polyline(
  points: Array<[number, number]>,
  stroke: string,
  opts: Record<string, string | number> = {},
): string {
  const pts = points.map(([x, y]) => `${round(x)},${round(y)}`).join(" ");
  return el("polyline", {
    points: pts,
    fill: "none",
    stroke,
    "stroke-width": 1.5,
    ...opts,
  });
}

export function round(v: number): number {
  return Math.round(v * 100) / 100;
}

export const SERIES_COLORS = [
  "#4063d8",
  "#d66b27",
  "#389826",
  "#9558b2",
  "#cb3c33",
  "#0097a7",
  "#8d6e63",
];

/** Piecewise-linear colormap from deep blue through teal to yellow. */
export function heatColor(t: number): string {
  const stops: Array<[number, [number, number, number]]> = [
    [0.0, [68, 1, 84]],
    [0.25, [59, 82, 139]],
    [0.5, [33, 145, 140]],
    [0.75, [94, 201, 98]],
    [1.0, [253, 231, 37]],
  ];
  const x = Math.min(1, Math.max(0, t));
  for (let i = 1; i < stops.length; i++) {
    const [t1, c1] = stops[i];
    const [t0, c0] = stops[i - 1];
    if (x <= t1) {
      const f = (x - t0) / (t1 - t0);
      const c = c0.map((a, j) => Math.round(a + f * (c1[j] - a)));
      return `rgb(${c[0]},${c[1]},${c[2]})`;
    }
  }
  return "rgb(253,231,37)";
}
