import { describe, expect, it } from "vitest";

import {
  formatNumber,
  linearScale,
  linearTicks,
  logScale,
  niceStep,
} from "../src/scale";

describe("niceStep", () => {
  it("rounds up to 1-2-2.5-5 style steps", () => {
    expect(niceStep(0.9)).toBe(1);
    expect(niceStep(1.0)).toBe(1);
    expect(niceStep(1.7)).toBe(2);
    expect(niceStep(30)).toBe(50);
    expect(niceStep(220)).toBe(250);
  });
});

describe("linearTicks", () => {
  it("covers the range with round values", () => {
    expect(linearTicks(0, 10)).toEqual([0, 2, 4, 6, 8, 10]);
  });

  it("snaps near-zero ticks to exactly zero", () => {
    const ticks = linearTicks(-1, 1);
    expect(ticks).toContain(0);
  });

  it("handles degenerate ranges", () => {
    expect(linearTicks(5, 5)).toEqual([5]);
  });
});

describe("linearScale", () => {
  it("maps the padded domain onto the pixel range monotonically", () => {
    const s = linearScale(0, 100, 50, 750);
    expect(s.toPixel(s.domain[0])).toBeCloseTo(50, 9);
    expect(s.toPixel(s.domain[1])).toBeCloseTo(750, 9);
    expect(s.toPixel(30)).toBeLessThan(s.toPixel(70));
    for (const t of s.ticks) {
      expect(t).toBeGreaterThanOrEqual(s.domain[0] - 1e-9);
      expect(t).toBeLessThanOrEqual(s.domain[1] + 1e-9);
    }
  });

  it("widens a zero-width domain", () => {
    const s = linearScale(3, 3, 0, 100);
    expect(s.domain[0]).toBeLessThan(3);
    expect(s.domain[1]).toBeGreaterThan(3);
  });
});

describe("logScale", () => {
  it("uses decade ticks", () => {
    const s = logScale(1e-3, 1, 400, 40);
    expect(s.ticks).toEqual([1e-3, 1e-2, 1e-1, 1]);
  });

  it("strides decades when the span is wide", () => {
    const s = logScale(1e-12, 1, 400, 40);
    expect(s.ticks.length).toBeLessThanOrEqual(9);
  });

  it("inverts the pixel direction for y axes", () => {
    const s = logScale(1e-2, 1, 400, 40);
    expect(s.toPixel(1e-2)).toBeGreaterThan(s.toPixel(1));
  });

  it("rejects non-positive bounds", () => {
    expect(() => logScale(0, 1, 0, 100)).toThrow(/positive/);
  });
});

describe("formatNumber", () => {
  it("prints integers plainly", () => {
    expect(formatNumber(0)).toBe("0");
    expect(formatNumber(600)).toBe("600");
    expect(formatNumber(-25)).toBe("-25");
  });

  it("trims trailing zeros from decimals", () => {
    expect(formatNumber(0.25)).toBe("0.25");
    expect(formatNumber(1234.5678)).toBe("1234.57");
  });

  it("uses exponent form outside the plain range", () => {
    expect(formatNumber(1e-7)).toBe("1e-7");
    expect(formatNumber(2.5e8)).toBe("2.5e8");
  });
});
