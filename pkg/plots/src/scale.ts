/** Axis scales and tick generation (the only arithmetic in this package). */

export interface Scale {
  (value: number): number;
  ticks(): number[];
  domain: [number, number];
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const fn = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  fn.ticks = () => {
    const step = tickStep(d0, d1);
    const out: number[] = [];
    for (let t = Math.ceil(d0 / step) * step; t <= d1 + 1e-12; t += step) {
      out.push(Number(t.toPrecision(12)));
    }
    return out;
  };
  return fn;
}

export function logScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  if (domain[0] <= 0 || domain[1] <= 0) {
    throw new Error("log scale requires positive domain bounds");
  }
  const l0 = Math.log10(domain[0]);
  const l1 = Math.log10(domain[1]);
  const inner = linearScale([l0, l1], range);
  const fn = ((v: number) => inner(Math.log10(v))) as Scale;
  fn.domain = domain;
  fn.ticks = () => {
    const out: number[] = [];
    const lo = Math.floor(l0);
    const hi = Math.ceil(l1);
    const every = Math.max(1, Math.round((hi - lo) / 8));
    for (let e = lo; e <= hi; e += every) {
      const v = 10 ** e;
      if (v >= domain[0] / 1.0001 && v <= domain[1] * 1.0001) out.push(v);
    }
    return out.length >= 2 ? out : [domain[0], domain[1]];
  };
  return fn;
}

function tickStep(lo: number, hi: number, count = 6): number {
  const raw = (hi - lo) / count || 1;
  const pow = 10 ** Math.floor(Math.log10(raw));
  const frac = raw / pow;
  const nice = frac >= 5 ? 10 : frac >= 2 ? 5 : frac >= 1 ? 2 : 1;
  return nice * pow;
}

export function extent(values: number[]): [number, number] {
  if (values.length === 0) throw new Error("cannot take extent of no data");
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 1e4 || abs < 1e-3) {
    const e = Math.floor(Math.log10(abs));
    const m = v / 10 ** e;
    const ms = Math.abs(m - 1) < 1e-9 ? "" : `${Number(m.toPrecision(3))}x`;
    return `${ms}1e${e}`;
  }
  return String(Number(v.toPrecision(4)));
}
