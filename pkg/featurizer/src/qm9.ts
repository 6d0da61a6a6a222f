import * as fs from "fs";
import * as path from "path";

import { JobError, SmilesRecord } from "./featurize";
import { readTarEntries } from "./tar";

/**
 * Scalar properties on line 2 of a QM9 record, in file order, following the
 * leading tag and index fields. mu is the dipole moment in Debye.
 */
export const QM9_PROPERTIES: readonly string[] = [
  "A",
  "B",
  "C",
  "mu",
  "alpha",
  "homo",
  "lumo",
  "gap",
  "r2",
  "zpve",
  "U0",
  "U",
  "H",
  "G",
  "Cv",
];

export interface Qm9Record {
  id: string;
  nAtoms: number;
  properties: Record<string, number>;
  /** relaxed-geometry SMILES when present, otherwise the GDB SMILES */
  smiles: string;
}

/**
 * Parse one record in the extended-xyz layout used by QM9: atom count,
 * a property line `<tag> <index> <15 values>`, the atom block, the
 * frequency line, a SMILES line (GDB and relaxed), and an InChI line.
 */
export function parseQm9Record(text: string): Qm9Record {
  const lines = text.split(/\r?\n/);
  const nAtoms = parseInt(lines[0]?.trim() ?? "", 10);
  if (!Number.isFinite(nAtoms) || nAtoms < 1) {
    throw new JobError(`record does not start with an atom count: ${lines[0]}`);
  }
  const propFields = (lines[1] ?? "").trim().split(/\s+/);
  if (propFields.length < 2 + QM9_PROPERTIES.length) {
    throw new JobError(
      `property line has ${propFields.length} fields, ` +
        `expected tag + index + ${QM9_PROPERTIES.length} values`,
    );
  }
  const tag = propFields[0];
  const index = propFields[1];
  const properties: Record<string, number> = {};
  QM9_PROPERTIES.forEach((name, i) => {
    properties[name] = Number(propFields[2 + i]);
  });
  const smilesLine = (lines[2 + nAtoms + 1] ?? "").trim();
  const smilesFields = smilesLine.split(/\s+/).filter((f) => f.length > 0);
  if (smilesFields.length === 0) {
    throw new JobError(`record ${tag}_${index} has no SMILES line`);
  }
  return {
    id: `${tag}_${index}`,
    nAtoms,
    properties,
    smiles: smilesFields[smilesFields.length - 1],
  };
}

function recordTexts(archivePath: string): { name: string; text: string }[] {
  const stat = fs.statSync(archivePath);
  if (stat.isDirectory()) {
    return fs
      .readdirSync(archivePath)
      .filter((f) => f.endsWith(".xyz"))
      .sort()
      .map((f) => ({
        name: f,
        text: fs.readFileSync(path.join(archivePath, f), "utf-8"),
      }));
  }
  return readTarEntries(fs.readFileSync(archivePath))
    .filter((e) => e.name.endsWith(".xyz"))
    .sort((a, b) => (a.name < b.name ? -1 : a.name > b.name ? 1 : 0))
    .map((e) => ({ name: e.name, text: e.content.toString("utf-8") }));
}

export type Logger = (message: string) => void;

/**
 * Read every record in a QM9 archive: a directory of .xyz files or a
 * .tar / .tar.gz of them. Malformed records are skipped with a log line.
 */
export function readQm9Records(
  archivePath: string,
  log: Logger = (m) => process.stderr.write(m + "\n"),
): Qm9Record[] {
  const records: Qm9Record[] = [];
  for (const { name, text } of recordTexts(archivePath)) {
    try {
      records.push(parseQm9Record(text));
    } catch (err) {
      log(`skipping ${name}: ${err instanceof Error ? err.message : err}`);
    }
  }
  return records;
}

/** Map of record id to the value of one named property. */
export function extractQm9Targets(
  archivePath: string,
  propertyName: string,
  log?: Logger,
): Map<string, number> {
  if (!QM9_PROPERTIES.includes(propertyName)) {
    throw new JobError(
      `unknown property ${JSON.stringify(propertyName)}; ` +
        `available: ${QM9_PROPERTIES.join(", ")}`,
    );
  }
  const records = readQm9Records(archivePath, log);
  if (records.length === 0) {
    throw new JobError(`no records found in ${archivePath}`);
  }
  return new Map(records.map((r) => [r.id, r.properties[propertyName]]));
}

/** SMILES records with the chosen property as the regression target. */
export function qm9SmilesRecords(
  archivePath: string,
  propertyName: string,
  log?: Logger,
): SmilesRecord[] {
  if (!QM9_PROPERTIES.includes(propertyName)) {
    throw new JobError(
      `unknown property ${JSON.stringify(propertyName)}; ` +
        `available: ${QM9_PROPERTIES.join(", ")}`,
    );
  }
  const records = readQm9Records(archivePath, log);
  if (records.length === 0) {
    throw new JobError(`no records found in ${archivePath}`);
  }
  return records.map((r) => ({
    smiles: r.smiles,
    target: r.properties[propertyName],
    id: r.id,
  }));
}
