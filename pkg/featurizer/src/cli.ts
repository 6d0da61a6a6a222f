#!/usr/bin/env node
/**
 * featurize --smiles <file> | --qm9 <dir|tar|tar.gz> [--target mu] --out <csv>
 *
 * Produces a dataset CSV (id,target,<166 MACCS key columns>) consumable by
 * the interaction-fingerprint search CLI.
 */

import * as fs from "fs";

import { JobError, featurizeSmiles, parseSmilesFile, writeDatasetCsv } from "./featurize";
import { qm9SmilesRecords } from "./qm9";

interface CliArgs {
  smiles?: string;
  qm9?: string;
  target: string;
  out?: string;
}

function usage(): never {
  process.stderr.write(
    "usage: featurize --smiles <file> | --qm9 <dir|tar|tar.gz> [--target mu] --out <csv>\n",
  );
  process.exit(2);
}

function parseArgs(argv: string[]): CliArgs {
  const args: CliArgs = { target: "mu" };
  let i = 0;
  if (argv[0] === "featurize") {
    i = 1; // tolerate an explicit subcommand token
  }
  for (; i < argv.length; i++) {
    const flag = argv[i];
    const value = argv[i + 1];
    switch (flag) {
      case "--smiles":
        args.smiles = value;
        i++;
        break;
      case "--qm9":
        args.qm9 = value;
        i++;
        break;
      case "--target":
        args.target = value;
        i++;
        break;
      case "--out":
        args.out = value;
        i++;
        break;
      case "--help":
      case "-h":
        usage();
        break;
      default:
        process.stderr.write(`unknown flag: ${flag}\n`);
        usage();
    }
  }
  if (!args.out || (!args.smiles && !args.qm9) || (args.smiles && args.qm9)) {
    usage();
  }
  return args;
}

async function main(): Promise<void> {
  const args = parseArgs(process.argv.slice(2));
  const records = args.smiles
    ? parseSmilesFile(fs.readFileSync(args.smiles, "utf-8"))
    : qm9SmilesRecords(args.qm9 as string, args.target);
  const { rows, skipped } = await featurizeSmiles(records);
  writeDatasetCsv(args.out as string, rows);
  process.stderr.write(
    `wrote ${rows.length} rows (${skipped.length} skipped) to ${args.out}\n`,
  );
}

main().catch((err) => {
  if (err instanceof JobError) {
    process.stderr.write(`error: ${err.message}\n`);
    process.exit(1);
  }
  throw err;
});
