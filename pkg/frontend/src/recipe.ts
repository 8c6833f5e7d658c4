/** Figure recipes: small declarative JSON files checked into the repo. */

import { SCHEMA_COLUMNS } from "./csv";

export type SeriesStyle = "line" | "markers" | "bars";

export interface SeriesSpec {
  method: string;
  metric: string;
  label: string;
  style: SeriesStyle;
}

export interface FigureRecipe {
  title: string;
  csvPath: string | null;
  xColumn: string;
  xLabel: string;
  yLabel: string;
  scale: "linear" | "log-y";
  series: SeriesSpec[];
  output: string | null;
}

export class RecipeError extends Error {}

const STYLES: SeriesStyle[] = ["line", "markers", "bars"];
const METHODS = ["exact", "approx", "asymptotic", "mc"];

function asString(obj: Record<string, unknown>, key: string, fallback?: string): string {
  const v = obj[key];
  if (v === undefined && fallback !== undefined) return fallback;
  if (typeof v !== "string" || v.length === 0) {
    throw new RecipeError(`recipe field "${key}" must be a non-empty string`);
  }
  return v;
}

function parseSeries(raw: unknown, index: number): SeriesSpec {
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new RecipeError(`series[${index}] must be an object`);
  }
  const obj = raw as Record<string, unknown>;
  const method = asString(obj, "method");
  if (!METHODS.includes(method)) {
    throw new RecipeError(
      `series[${index}].method "${method}" is not one of ${METHODS.join(", ")}`,
    );
  }
  const metric = asString(obj, "metric");
  const defaultStyle: SeriesStyle = method === "mc" ? "markers" : "line";
  const style = asString(obj, "style", defaultStyle);
  if (!STYLES.includes(style as SeriesStyle)) {
    throw new RecipeError(
      `series[${index}].style "${style}" is not one of ${STYLES.join(", ")}`,
    );
  }
  return {
    method,
    metric,
    label: asString(obj, "label", `${method} ${metric}`),
    style: style as SeriesStyle,
  };
}

/** Parse and validate recipe JSON text. */
export function parseRecipe(text: string): FigureRecipe {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    throw new RecipeError(`recipe is not valid JSON: ${(err as Error).message}`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new RecipeError("recipe must be a JSON object");
  }
  const obj = raw as Record<string, unknown>;

  const xColumn = asString(obj, "x_column", "sweep_value");
  if (!(SCHEMA_COLUMNS as readonly string[]).includes(xColumn)) {
    throw new RecipeError(
      `x_column "${xColumn}" is not a CSV schema column (${SCHEMA_COLUMNS.join(", ")})`,
    );
  }

  const scale = asString(obj, "scale", "linear");
  if (scale !== "linear" && scale !== "log-y") {
    throw new RecipeError(`scale must be "linear" or "log-y", got "${scale}"`);
  }

  const seriesRaw = obj["series"];
  if (!Array.isArray(seriesRaw) || seriesRaw.length === 0) {
    throw new RecipeError('recipe field "series" must be a non-empty array');
  }
  const series = seriesRaw.map(parseSeries);

  const barCount = series.filter((s) => s.style === "bars").length;
  if (barCount > 0 && barCount !== series.length) {
    throw new RecipeError("bar series cannot be mixed with line or marker series");
  }

  return {
    title: asString(obj, "title", ""),
    csvPath: typeof obj["csv_path"] === "string" ? (obj["csv_path"] as string) : null,
    xColumn,
    xLabel: asString(obj, "x_label", xColumn),
    yLabel: asString(obj, "y_label", "value"),
    scale,
    series,
    output: typeof obj["output"] === "string" ? (obj["output"] as string) : null,
  };
}
