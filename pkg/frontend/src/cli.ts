#!/usr/bin/env node
import * as fs from "fs";

import { FigureKind, render } from "./charts";
import { readCsv } from "./csv";

const USAGE = `usage: plot --kind se-cdf|capacity-cdf|complexity-bars --in <csv> --out <file>

Reads one harness CSV (cdf_se.csv, cdf_capacity.csv or costs.csv) and writes
a deterministic SVG figure.`;

interface Args {
  kind: FigureKind;
  inputs: string[];
  out: string;
}

export function parseArgs(argv: string[]): Args {
  const args = [...argv];
  if (args[0] === "plot") args.shift(); // allow the documented spelling
  let kind: string | undefined;
  const inputs: string[] = [];
  let out: string | undefined;
  for (let i = 0; i < args.length; i += 1) {
    const a = args[i];
    if (a === "--kind") {
      kind = args[++i];
    } else if (a === "--in") {
      while (i + 1 < args.length && !args[i + 1].startsWith("--")) {
        inputs.push(args[++i]);
      }
    } else if (a === "--out") {
      out = args[++i];
    } else if (a === "--help" || a === "-h") {
      throw new Error(USAGE);
    } else {
      throw new Error(`unknown argument '${a}'\n${USAGE}`);
    }
  }
  if (!kind || !["se-cdf", "capacity-cdf", "complexity-bars"].includes(kind)) {
    throw new Error(`--kind must be se-cdf, capacity-cdf or complexity-bars\n${USAGE}`);
  }
  if (inputs.length === 0 || !out) {
    throw new Error(`--in and --out are required\n${USAGE}`);
  }
  return { kind: kind as FigureKind, inputs, out };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  try {
    for (const input of args.inputs) {
      if (!fs.existsSync(input)) throw new Error(`input file not found: ${input}`);
    }
    // one figure per invocation; extra inputs are concatenated row-wise
    const tables = args.inputs.map(readCsv);
    const merged = tables[0];
    for (const t of tables.slice(1)) {
      if (t.columns.join(",") !== merged.columns.join(",")) {
        throw new Error(`column mismatch between ${merged.path} and ${t.path}`);
      }
      merged.rows.push(...t.rows);
    }
    const image = render(args.kind, merged);
    fs.writeFileSync(args.out, image);
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
