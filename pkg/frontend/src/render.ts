/** Chart assembly: sweep rows + recipe -> SVG text. */

import { SweepRow, availablePairs } from "./csv";
import { FigureRecipe, SeriesSpec } from "./recipe";
import { Scale, formatNumber, linearScale, linearTicks, logScale, logTickLabel } from "./scale";
import * as svg from "./svg";

export class RenderError extends Error {}

const WIDTH = 760;
const HEIGHT = 480;
const MARGIN = { top: 48, right: 26, bottom: 58, left: 72 };
const PLOT_X0 = MARGIN.left;
const PLOT_X1 = WIDTH - MARGIN.right;
const PLOT_Y0 = MARGIN.top;
const PLOT_Y1 = HEIGHT - MARGIN.bottom;

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#ff7f0e",
  "#9467bd",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];
const DASHES = ["", "6 3", "2 3", "8 3 2 3"];
const CASE_METRICS = ["case1", "case2", "case3", "case4"];

interface Point {
  x: number;
  y: number;
  ci: number | null;
}

interface Resolved {
  label: string;
  style: SeriesSpec["style"];
  color: string;
  dash: string;
  points: Point[];
}

function xValue(row: SweepRow, column: string): number {
  if (column === "sweep_value") return row.sweepValue;
  if (column === "value") return row.value;
  throw new RenderError(`x_column "${column}" is not numeric in this schema`);
}

function resolveOne(
  rows: SweepRow[],
  spec: SeriesSpec,
  metric: string,
  label: string,
  index: number,
  xColumn: string,
): Resolved {
  const matched = rows.filter(
    (r) => r.method === spec.method && r.metric === metric,
  );
  if (matched.length === 0) {
    throw new RenderError(
      `no rows for series ${spec.method}/${metric}; ` +
        `CSV provides: ${availablePairs(rows).join(", ")}`,
    );
  }
  const points = matched
    .map((r) => ({ x: xValue(r, xColumn), y: r.value, ci: r.ciHalfwidth }))
    .sort((a, b) => a.x - b.x);
  return {
    label,
    style: spec.style,
    color: PALETTE[index % PALETTE.length],
    dash: DASHES[index % DASHES.length],
    points,
  };
}

/** Expand recipe series against the rows; "cases" fans out into four. */
function resolveSeries(rows: SweepRow[], recipe: FigureRecipe): Resolved[] {
  const out: Resolved[] = [];
  for (const spec of recipe.series) {
    if (spec.metric === "cases") {
      for (const [k, metric] of CASE_METRICS.entries()) {
        out.push(
          resolveOne(rows, spec, metric, `${spec.label} case ${k + 1}`, out.length, recipe.xColumn),
        );
      }
    } else {
      out.push(
        resolveOne(rows, spec, spec.metric, spec.label, out.length, recipe.xColumn),
      );
    }
  }
  return out;
}

function yExtent(series: Resolved[], logY: boolean): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    for (const p of s.points) {
      if (logY && p.y <= 0) continue;
      const half = p.ci ?? 0;
      const low = logY ? p.y : p.y - half;
      if (low > 0 || !logY) lo = Math.min(lo, low);
      hi = Math.max(hi, p.y + half);
    }
  }
  if (!(lo <= hi)) {
    throw new RenderError("no plottable values (log scale drops values <= 0)");
  }
  return [lo, hi];
}

function axes(
  xTicks: number[],
  xScale: (v: number) => number,
  xTickLabel: (v: number) => string,
  yScale: Scale,
  recipe: FigureRecipe,
): string[] {
  const yTickLabel = recipe.scale === "log-y" ? logTickLabel : formatNumber;
  const parts: string[] = [];
  for (const t of yScale.ticks) {
    const y = yScale.toPixel(t);
    parts.push(
      svg.tag("line", {
        x1: PLOT_X0, y1: y, x2: PLOT_X1, y2: y,
        stroke: "#dddddd", "stroke-width": "1",
      }),
    );
    parts.push(svg.text(PLOT_X0 - 8, y + 4, yTickLabel(t), "end"));
  }
  for (const t of xTicks) {
    const x = xScale(t);
    parts.push(
      svg.tag("line", {
        x1: x, y1: PLOT_Y1, x2: x, y2: PLOT_Y1 + 5,
        stroke: "#222222", "stroke-width": "1",
      }),
    );
    parts.push(svg.text(x, PLOT_Y1 + 20, xTickLabel(t), "middle"));
  }
  parts.push(
    svg.tag("rect", {
      x: PLOT_X0, y: PLOT_Y0,
      width: PLOT_X1 - PLOT_X0, height: PLOT_Y1 - PLOT_Y0,
      fill: "none", stroke: "#222222", "stroke-width": "1",
    }),
  );
  parts.push(svg.text((PLOT_X0 + PLOT_X1) / 2, HEIGHT - 14, recipe.xLabel, "middle"));
  parts.push(
    svg.text(20, (PLOT_Y0 + PLOT_Y1) / 2, recipe.yLabel, "middle", {
      transform: `rotate(-90 20 ${(PLOT_Y0 + PLOT_Y1) / 2})`,
    }),
  );
  if (recipe.title) {
    parts.push(
      svg.text((PLOT_X0 + PLOT_X1) / 2, 24, recipe.title, "middle", {
        "font-size": "15",
        "font-weight": "bold",
      }),
    );
  }
  return parts;
}

function errorBar(x: number, yLo: number, yHi: number, color: string): string[] {
  return [
    svg.tag("line", { x1: x, y1: yLo, x2: x, y2: yHi, stroke: color, "stroke-width": "1.2" }),
    svg.tag("line", { x1: x - 4, y1: yLo, x2: x + 4, y2: yLo, stroke: color, "stroke-width": "1.2" }),
    svg.tag("line", { x1: x - 4, y1: yHi, x2: x + 4, y2: yHi, stroke: color, "stroke-width": "1.2" }),
  ];
}

function clampLog(v: number, domainLo: number): number {
  return v > 0 ? v : domainLo;
}

function legend(series: Resolved[]): string[] {
  const parts: string[] = [];
  const x0 = PLOT_X1 - 180;
  let y = PLOT_Y0 + 16;
  for (const s of series) {
    if (s.style === "line") {
      parts.push(svg.polyline([[x0, y - 4], [x0 + 22, y - 4]], s.color, s.dash || undefined));
    } else if (s.style === "markers") {
      parts.push(svg.tag("circle", { cx: x0 + 11, cy: y - 4, r: 3, fill: s.color }));
    } else {
      parts.push(svg.tag("rect", { x: x0 + 4, y: y - 10, width: 14, height: 12, fill: s.color }));
    }
    parts.push(svg.text(x0 + 28, y, s.label, "start"));
    y += 16;
  }
  return parts;
}

function renderCartesian(series: Resolved[], recipe: FigureRecipe): string {
  const logY = recipe.scale === "log-y";
  const kept = series.map((s) => ({
    ...s,
    points: logY ? s.points.filter((p) => p.y > 0) : s.points,
  }));
  const xs = kept.flatMap((s) => s.points.map((p) => p.x));
  if (xs.length === 0) {
    throw new RenderError("no plottable values (log scale drops values <= 0)");
  }
  const [yLo, yHi] = yExtent(kept, logY);
  const xScale = linearScale(Math.min(...xs), Math.max(...xs), PLOT_X0, PLOT_X1);
  const yScale = logY
    ? logScale(yLo, yHi, PLOT_Y1, PLOT_Y0)
    : linearScale(yLo, yHi, PLOT_Y1, PLOT_Y0);

  const parts = axes(xScale.ticks, xScale.toPixel, formatNumber, yScale, recipe);
  for (const s of kept) {
    if (s.style === "line") {
      parts.push(
        svg.polyline(
          s.points.map((p) => [xScale.toPixel(p.x), yScale.toPixel(p.y)]),
          s.color,
          s.dash || undefined,
        ),
      );
      continue;
    }
    for (const p of s.points) {
      const x = xScale.toPixel(p.x);
      if (p.ci !== null && p.ci > 0) {
        const lo = logY ? clampLog(p.y - p.ci, yScale.domain[0]) : p.y - p.ci;
        parts.push(...errorBar(x, yScale.toPixel(lo), yScale.toPixel(p.y + p.ci), s.color));
      }
      parts.push(svg.tag("circle", { cx: x, cy: yScale.toPixel(p.y), r: 3, fill: s.color }));
    }
  }
  parts.push(...legend(kept));
  return svg.document(WIDTH, HEIGHT, parts);
}

function renderBars(series: Resolved[], recipe: FigureRecipe): string {
  const logY = recipe.scale === "log-y";
  const groups = [...new Set(series.flatMap((s) => s.points.map((p) => p.x)))].sort(
    (a, b) => a - b,
  );
  const [, yHiRaw] = yExtent(series, logY);
  const yLo = logY ? yExtent(series, true)[0] : 0;
  const yScale = logY
    ? logScale(yLo, yHiRaw, PLOT_Y1, PLOT_Y0)
    : linearScale(0, yHiRaw, PLOT_Y1, PLOT_Y0);

  const slotW = (PLOT_X1 - PLOT_X0) / groups.length;
  const innerW = slotW * 0.72;
  const barW = innerW / series.length;
  const slotCenter = (gi: number) => PLOT_X0 + (gi + 0.5) * slotW;

  const parts = axes(
    groups.map((_, gi) => gi),
    (gi) => slotCenter(gi),
    (gi) => formatNumber(groups[gi]),
    yScale,
    recipe,
  );
  const base = yScale.toPixel(logY ? yScale.domain[0] : 0);
  series.forEach((s, si) => {
    const byX = new Map(s.points.map((p) => [p.x, p]));
    groups.forEach((gx, gi) => {
      const p = byX.get(gx);
      if (!p || (logY && p.y <= 0)) return;
      const x = slotCenter(gi) - innerW / 2 + si * barW;
      const top = yScale.toPixel(p.y);
      parts.push(
        svg.tag("rect", {
          x,
          y: Math.min(top, base),
          width: barW,
          height: Math.abs(base - top),
          fill: s.color,
          stroke: "#ffffff",
          "stroke-width": "0.5",
        }),
      );
      if (p.ci !== null && p.ci > 0) {
        const lo = logY ? clampLog(p.y - p.ci, yScale.domain[0]) : p.y - p.ci;
        parts.push(
          ...errorBar(x + barW / 2, yScale.toPixel(lo), yScale.toPixel(p.y + p.ci), "#222222"),
        );
      }
    });
  });
  parts.push(...legend(series));
  return svg.document(WIDTH, HEIGHT, parts);
}

/** Render a recipe against parsed sweep rows. Pure: no clock, no randomness. */
export function renderFigure(rows: SweepRow[], recipe: FigureRecipe): string {
  const series = resolveSeries(rows, recipe);
  if (series[0].style === "bars") {
    return renderBars(series, recipe);
  }
  return renderCartesian(series, recipe);
}
