/** Axis scales and tick selection. */

export interface Scale {
  toPixel(value: number): number;
  ticks: number[];
}

export function linearScale(lo: number, hi: number, pxLo: number, pxHi: number): Scale {
  if (hi <= lo) hi = lo + 1;
  const span = hi - lo;
  const step = niceStep(span / 6);
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + 1e-12 * span; t += step) {
    ticks.push(roundTick(t, step));
  }
  return {
    toPixel: (v) => pxLo + ((v - lo) / span) * (pxHi - pxLo),
    ticks,
  };
}

export function logScale(lo: number, hi: number, pxLo: number, pxHi: number): Scale {
  if (lo <= 0) throw new Error("log scale needs positive values");
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi <= lo ? lo * 10 : hi);
  const ticks: number[] = [];
  for (let e = Math.floor(llo); e <= Math.ceil(lhi); e += 1) {
    ticks.push(10 ** e);
  }
  return {
    toPixel: (v) => pxLo + ((Math.log10(v) - llo) / (lhi - llo)) * (pxHi - pxLo),
    ticks,
  };
}

function niceStep(raw: number): number {
  const mag = 10 ** Math.floor(Math.log10(raw));
  const r = raw / mag;
  if (r <= 1) return mag;
  if (r <= 2) return 2 * mag;
  if (r <= 5) return 5 * mag;
  return 10 * mag;
}

function roundTick(t: number, step: number): number {
  const digits = Math.max(0, -Math.floor(Math.log10(step)) + 1);
  return Number(t.toFixed(digits + 2));
}

export function formatTick(v: number): string {
  if (v !== 0 && (Math.abs(v) >= 1e5 || Math.abs(v) < 1e-3)) {
    return formatLogTick(v);
  }
  return `${Number(v.toPrecision(6))}`;
}

export function formatLogTick(v: number): string {
  const e = Math.floor(Math.log10(Math.abs(v)));
  const m = v / 10 ** e;
  return m === 1 ? `1e${e}` : `${Number(m.toPrecision(3))}e${e}`;
}
