import { execFileSync } from "child_process";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";

import { describe, expect, it } from "vitest";
import { z } from "zod";

import { featurizeSmiles, writeDatasetCsv, SmilesRecord } from "../src/featurize";

/**
 * Independent mirror of the search pipeline's report schema: the pipeline
 * validates with jsonschema on emit, this end checks the file it actually
 * reads back.
 */
const Trial = z
  .object({
    trial_id: z.number().int().nonnegative(),
    n_samples: z.number().int().positive(),
    m: z.number().int().positive(),
    u: z.number().int().nonnegative(),
    fingerprint: z.string(),
    effective: z.boolean(),
    valid: z.boolean(),
    swmse: z.number(),
    mse_best_single: z.number(),
    wall_time: z.number().nonnegative(),
  })
  .passthrough();

const Report = z.object({
  config: z.record(z.unknown()),
  trials: z.array(Trial),
  overlap: z
    .object({
      labels: z.array(z.string()),
      values: z.array(z.array(z.number())),
    })
    .nullable(),
  importance: z
    .object({ model: z.record(z.unknown()), scores: z.record(z.number()) })
    .nullable(),
  effective_counts: z.record(z.number().int().nonnegative()),
});

/** ~220 small organic molecules with deterministic synthetic targets. */
function moleculeBatch(): SmilesRecord[] {
  const families: ((k: number) => string)[] = [
    (k) => "C".repeat(k + 1), // alkanes
    (k) => "C".repeat(k + 1) + "O", // alcohols
    (k) => "C".repeat(k + 1) + "N", // amines
    (k) => "C".repeat(k + 1) + "OC", // ethers
    (k) => "C".repeat(k + 1) + "C(=O)O", // acids
    (k) => "c1ccccc1" + "C".repeat(k), // alkylbenzenes
    (k) => "Oc1ccccc1" + "C".repeat(k), // phenols
  ];
  const records: SmilesRecord[] = [];
  let n = 0;
  for (let k = 0; k < 32; k++) {
    for (const family of families) {
      const smiles = family(k);
      // deterministic pseudo-target: polar families score higher
      const polar = /O|N/.test(smiles) ? 1.5 : 0.2;
      records.push({
        smiles,
        target: polar + 0.07 * (k % 5) + 0.013 * (n % 7),
        id: `syn${n}`,
      });
      n++;
    }
  }
  return records;
}

describe("featurize -> search pipeline", () => {
  it("runs 10 trials at n_samples=200, m=3 and emits a valid report", async () => {
    const batch = moleculeBatch();
    expect(batch.length).toBeGreaterThanOrEqual(220);

    const { rows, skipped } = await featurizeSmiles(batch, () => {});
    expect(skipped).toHaveLength(0);
    expect(rows.length).toBeGreaterThanOrEqual(220);

    const dir = fs.mkdtempSync(path.join(os.tmpdir(), "e2e-"));
    const csv = path.join(dir, "molecules.csv");
    writeDatasetCsv(csv, rows);

    // contract round-trip: the CSV loads through the search pipeline's loader
    const loaded = execFileSync(
      "python3",
      [
        "-c",
        "import sys; from qubofp import load_dataset; d = load_dataset(sys.argv[1]); " +
          "print(d.n_samples, d.n_fingerprints)",
        csv,
      ],
      { encoding: "utf-8" },
    ).trim();
    const [nSamples, nFingerprints] = loaded.split(" ").map(Number);
    expect(nSamples).toBe(rows.length);
    expect(nFingerprints).toBe(166);

    const out = path.join(dir, "report");
    execFileSync(
      "python3",
      [
        "-m",
        "qubofp",
        "search",
        "--dataset",
        csv,
        "--augment",
        "--n-samples",
        "200",
        "--m",
        "3",
        "--trials",
        "10",
        "--seed",
        "3",
        "--sweeps",
        "500",
        "--restarts",
        "2",
        "--out",
        out,
      ],
      { stdio: ["ignore", "pipe", "pipe"] },
    );

    const reportPath = path.join(out, "report.json");
    const report = Report.parse(JSON.parse(fs.readFileSync(reportPath, "utf-8")));
    expect(report.trials).toHaveLength(10);
    expect(Object.keys(report.effective_counts)).toEqual(["200,3"]);
    for (const key of Object.keys(report.effective_counts)) {
      expect(key).toMatch(/^\d+,\d+$/);
    }
    expect(fs.existsSync(path.join(out, "effective_fingerprints.csv"))).toBe(true);
    expect(fs.existsSync(path.join(out, "effective_counts.csv"))).toBe(true);
  }, 300000);
});
