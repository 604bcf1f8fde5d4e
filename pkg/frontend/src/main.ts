/** Argument parsing and top-level driver for the plot CLI. */

import { readFileSync, writeFileSync } from "node:fs";
import { MissingColumnError, parseCsv } from "./csv.js";
import { FigureKind, FigureSpec, render } from "./plots.js";

const KINDS: FigureKind[] = ["entropy-curves", "variance-curve", "heatmap"];

export class UsageError extends Error {}

export interface Args {
  kind: FigureKind;
  in1: string;
  in2?: string;
  out: string;
  truncate?: number;
  sqrtRef: boolean;
}

const USAGE =
  "usage: plot <entropy-curves|variance-curve|heatmap> --in <csv> " +
  "[--in2 <csv>] --out <img> [--truncate <v>] [--sqrt-ref]\n";

export function parseArgs(argv: string[]): Args {
  if (argv.length === 0 || !KINDS.includes(argv[0] as FigureKind)) {
    throw new UsageError(`unknown figure kind: ${argv[0] ?? "(none)"}`);
  }
  const args: Partial<Args> = { kind: argv[0] as FigureKind, sqrtRef: false };
  for (let i = 1; i < argv.length; i++) {
    const flag = argv[i];
    if (flag === "--sqrt-ref") {
      args.sqrtRef = true;
      continue;
    }
    const value = argv[++i];
    if (value === undefined) throw new UsageError(`missing value for ${flag}`);
    if (flag === "--in") args.in1 = value;
    else if (flag === "--in2") args.in2 = value;
    else if (flag === "--out") args.out = value;
    else if (flag === "--truncate") {
      args.truncate = Number(value);
      if (!Number.isFinite(args.truncate)) {
        throw new UsageError(`--truncate needs a number, got ${value}`);
      }
    } else throw new UsageError(`unknown flag ${flag}`);
  }
  if (!args.in1 || !args.out) throw new UsageError("--in and --out are required");
  return args as Args;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n${USAGE}`);
    return 2;
  }
  try {
    const spec: FigureSpec = {
      kind: args.kind,
      input: parseCsv(readFileSync(args.in1, "utf8")),
      inputFile: args.in1,
      truncate: args.truncate,
      sqrtRef: args.sqrtRef,
    };
    if (args.in2) {
      spec.input2 = parseCsv(readFileSync(args.in2, "utf8"));
      spec.input2File = args.in2;
    }
    writeFileSync(args.out, render(spec));
    process.stdout.write(args.out + "\n");
    return 0;
  } catch (err) {
    if (err instanceof MissingColumnError) {
      process.stderr.write(`error: ${err.message}\n`);
    } else {
      process.stderr.write(`error: ${(err as Error).message}\n`);
    }
    return 1;
  }
}
