/** Axis scales and tick selection. Pure functions, deterministic output. */

export interface Scale {
  /** Map a data value to a pixel coordinate. */
  toPixel(v: number): number;
  ticks: number[];
  domain: [number, number];
}

/** Smallest "nice" step (1, 2, 2.5 or 5 times a power of ten) at or above rough. */
export function niceStep(rough: number): number {
  const power = Math.floor(Math.log10(rough));
  const base = Math.pow(10, power);
  const candidates = [1, 2, 2.5, 5, 10].map((m) => m * base);
  for (const c of candidates) {
    if (c >= rough - base * 1e-9) return c;
  }
  return candidates[candidates.length - 1];
}

export function linearTicks(lo: number, hi: number, target = 6): number[] {
  if (!(hi > lo)) return [lo];
  const step = niceStep((hi - lo) / target);
  const first = Math.ceil(lo / step - 1e-9) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + step * 1e-9; v += step) {
    // Snap to the tick lattice so floating accumulation cannot shift labels.
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : Number(v.toPrecision(12)));
  }
  return ticks;
}

export function linearScale(lo: number, hi: number, pixLo: number, pixHi: number): Scale {
  if (hi === lo) {
    lo -= 1;
    hi += 1;
  }
  const pad = 0.04 * (hi - lo);
  const d0 = lo - pad;
  const d1 = hi + pad;
  return {
    toPixel: (v) => pixLo + ((v - d0) / (d1 - d0)) * (pixHi - pixLo),
    ticks: linearTicks(d0, d1),
    domain: [d0, d1],
  };
}

export function logScale(lo: number, hi: number, pixLo: number, pixHi: number): Scale {
  if (!(lo > 0) || !(hi > 0)) {
    throw new Error(`log scale requires positive data, got [${lo}, ${hi}]`);
  }
  let e0 = Math.floor(Math.log10(lo) + 1e-12);
  let e1 = Math.ceil(Math.log10(hi) - 1e-12);
  if (e0 === e1) {
    e0 -= 1;
    e1 += 1;
  }
  const stride = Math.max(1, Math.ceil((e1 - e0) / 8));
  const ticks: number[] = [];
  for (let e = e0; e <= e1; e += stride) {
    ticks.push(Math.pow(10, e));
  }
  const l0 = e0;
  const l1 = e1;
  return {
    toPixel: (v) => pixLo + ((Math.log10(v) - l0) / (l1 - l0)) * (pixHi - pixLo),
    ticks,
    domain: [Math.pow(10, e0), Math.pow(10, e1)],
  };
}

/** Compact deterministic number label. */
export function formatNumber(v: number): string {
  if (v === 0) return "0";
  if (Number.isInteger(v) && Math.abs(v) < 1e6) return String(v);
  const abs = Math.abs(v);
  if (abs >= 1e-4 && abs < 1e6) {
    return trimZeros(v.toPrecision(6));
  }
  const exp = v.toExponential(2);
  const [mantissa, exponent] = exp.split("e");
  return `${trimZeros(mantissa)}e${exponent.replace("+", "")}`;
}

function trimZeros(s: string): string {
  if (!s.includes(".")) return s;
  return s.replace(/0+$/, "").replace(/\.$/, "");
}

/** Label for a decade tick: plain decimals near 1, exponent form farther out. */
export function logTickLabel(v: number): string {
  const e = Math.round(Math.log10(v));
  if (e >= -2 && e <= 3) return formatNumber(v);
  return `1e${e}`;
}
