import * as fs from "fs";

import { MACCS_LABELS, maccsBits } from "./maccs";
import { getRDKit, molFromSmiles } from "./rdkit";

/** Raised when a job cannot produce any output at all. */
export class JobError extends Error {}

export interface SmilesRecord {
  smiles: string;
  target?: number;
  id?: string;
}

export interface DatasetRow {
  id: string;
  target: number;
  bits: Uint8Array;
}

export interface SkippedRecord {
  index: number;
  smiles: string;
  reason: string;
}

export interface FeaturizeResult {
  rows: DatasetRow[];
  skipped: SkippedRecord[];
}

export type Logger = (message: string) => void;

/**
 * Parse a SMILES list file. Each non-blank, non-comment line is
 * `SMILES[,target[,id]]` (comma or whitespace separated). Missing targets
 * default to 0; missing ids are assigned as mol<line index>.
 */
export function parseSmilesFile(text: string): SmilesRecord[] {
  const records: SmilesRecord[] = [];
  const lines = text.split(/\r?\n/);
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line || line.startsWith("#")) {
      continue;
    }
    const fields = line.split(/[,\s]+/).filter((f) => f.length > 0);
    const record: SmilesRecord = { smiles: fields[0] };
    if (fields.length > 1) {
      const value = Number(fields[1]);
      if (Number.isFinite(value)) {
        record.target = value;
      } else {
        // second field is not numeric: treat it as the id
        record.id = fields[1];
      }
    }
    if (fields.length > 2 && record.id === undefined) {
      record.id = fields[2];
    }
    records.push(record);
  }
  return records;
}

/**
 * Featurize molecules into 166 MACCS-key bit columns.
 *
 * Unparseable SMILES are skipped and logged with their reason; the job
 * fails only when no molecule survives. Input order is preserved.
 */
export async function featurizeSmiles(
  records: SmilesRecord[],
  log: Logger = (m) => process.stderr.write(m + "\n"),
): Promise<FeaturizeResult> {
  const rdkit = await getRDKit();
  const rows: DatasetRow[] = [];
  const skipped: SkippedRecord[] = [];
  for (let i = 0; i < records.length; i++) {
    const record = records[i];
    const mol = molFromSmiles(rdkit, record.smiles);
    if (mol === null) {
      const reason = record.smiles.trim() ? "SMILES failed to parse" : "empty SMILES";
      skipped.push({ index: i, smiles: record.smiles, reason });
      log(`skipping record ${i} (${JSON.stringify(record.smiles)}): ${reason}`);
      continue;
    }
    try {
      rows.push({
        id: record.id ?? `mol${i}`,
        target: record.target ?? 0,
        bits: maccsBits(mol),
      });
    } finally {
      mol.delete();
    }
  }
  if (rows.length === 0) {
    throw new JobError(`no valid molecules among ${records.length} records`);
  }
  return { rows, skipped };
}

/** Serialize rows to the dataset CSV contract: id,target,<166 key columns>. */
export function datasetCsv(rows: DatasetRow[]): string {
  const header = ["id", "target", ...MACCS_LABELS].join(",");
  const lines = [header];
  for (const row of rows) {
    if (row.id.includes(",")) {
      throw new JobError(`molecule id ${JSON.stringify(row.id)} contains a comma`);
    }
    lines.push([row.id, String(row.target), ...row.bits].join(","));
  }
  return lines.join("\n") + "\n";
}

export function writeDatasetCsv(path: string, rows: DatasetRow[]): void {
  fs.writeFileSync(path, datasetCsv(rows), "utf-8");
}
