/** Parser for the sweep CSV written by the satsec command line tool. */

export const SCHEMA_COLUMNS = [
  "sweep_var",
  "sweep_value",
  "method",
  "metric",
  "value",
  "ci_halfwidth",
  "n_trials",
  "seed",
] as const;

export type SchemaColumn = (typeof SCHEMA_COLUMNS)[number];

export interface SweepRow {
  sweepVar: string;
  sweepValue: number;
  method: string;
  metric: string;
  value: number;
  /** Confidence half-width; null on analytic rows. */
  ciHalfwidth: number | null;
}

export class CsvError extends Error {}

function parseNumber(raw: string, column: string, line: number): number {
  const v = Number(raw);
  if (raw.trim() === "" || !Number.isFinite(v)) {
    throw new CsvError(`line ${line}: column ${column} is not a number: "${raw}"`);
  }
  return v;
}

/** Parse CSV text; rejects anything that does not match the sweep schema. */
export function parseSweepCsv(text: string): SweepRow[] {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new CsvError("empty CSV: no header line");
  }
  const header = lines[0].split(",");
  const expected = SCHEMA_COLUMNS.join(",");
  if (header.join(",") !== expected) {
    throw new CsvError(
      `header mismatch: got "${lines[0]}", expected "${expected}"`,
    );
  }
  if (lines.length === 1) {
    throw new CsvError("empty CSV: header but no data rows");
  }
  const rows: SweepRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== SCHEMA_COLUMNS.length) {
      throw new CsvError(
        `line ${i + 1}: expected ${SCHEMA_COLUMNS.length} fields, got ${parts.length}`,
      );
    }
    rows.push({
      sweepVar: parts[0],
      sweepValue: parseNumber(parts[1], "sweep_value", i + 1),
      method: parts[2],
      metric: parts[3],
      value: parseNumber(parts[4], "value", i + 1),
      ciHalfwidth: parts[5] === "" ? null : parseNumber(parts[5], "ci_halfwidth", i + 1),
    });
  }
  return rows;
}

/** Distinct "method/metric" pairs present in the rows, for error messages. */
export function availablePairs(rows: SweepRow[]): string[] {
  const seen = new Set<string>();
  for (const row of rows) {
    seen.add(`${row.method}/${row.metric}`);
  }
  return [...seen].sort();
}
