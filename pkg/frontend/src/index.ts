#!/usr/bin/env node
/** Command line entry: --csv sweep.csv --recipe fig.json --out fig.svg */

import * as fs from "fs";
import * as path from "path";

import { CsvError, parseSweepCsv } from "./csv";
import { RecipeError, parseRecipe } from "./recipe";
import { RenderError, renderFigure } from "./render";

const USAGE =
  "usage: satsec-plots --recipe RECIPE.json [--csv SWEEP.csv] [--out FIGURE.svg]\n" +
  "  --csv and --out default to the csv_path and output fields of the recipe";

interface Args {
  csv: string | null;
  recipe: string | null;
  out: string | null;
}

export function parseArgs(argv: string[]): Args {
  const args: Args = { csv: null, recipe: null, out: null };
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    if (flag !== "--csv" && flag !== "--recipe" && flag !== "--out") {
      throw new Error(`unknown argument: ${flag}`);
    }
    const value = argv[i + 1];
    if (value === undefined) {
      throw new Error(`missing value for ${flag}`);
    }
    args[flag.slice(2) as keyof Args] = value;
    i++;
  }
  if (!args.recipe) {
    throw new Error("--recipe is required");
  }
  return args;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n${USAGE}\n`);
    return 1;
  }
  try {
    const recipe = parseRecipe(fs.readFileSync(args.recipe as string, "utf8"));
    const csvPath = args.csv ?? recipe.csvPath;
    const outPath = args.out ?? recipe.output;
    if (!csvPath) {
      throw new RecipeError("no CSV path: pass --csv or set csv_path in the recipe");
    }
    if (!outPath) {
      throw new RecipeError("no output path: pass --out or set output in the recipe");
    }
    const rows = parseSweepCsv(fs.readFileSync(csvPath, "utf8"));
    const figure = renderFigure(rows, recipe);
    fs.mkdirSync(path.dirname(path.resolve(outPath)), { recursive: true });
    fs.writeFileSync(outPath, figure);
    return 0;
  } catch (err) {
    if (
      err instanceof CsvError ||
      err instanceof RecipeError ||
      err instanceof RenderError ||
      (err as NodeJS.ErrnoException).code === "ENOENT"
    ) {
      process.stderr.write(`error: ${(err as Error).message}\n`);
      return 1;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
