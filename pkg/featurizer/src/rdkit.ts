import type { JSMol, RDKitLoader, RDKitModule } from "@rdkit/rdkit";

/**
 * The shipped type definitions lag the runtime API; the MACCS accessor
 * exists on every JSMol but is missing from the .d.ts.
 */
export interface MolWithMaccs extends JSMol {
  get_maccs_fp(): string;
}

// CommonJS entry point: module.exports is the WASM loader function itself
// eslint-disable-next-line @typescript-eslint/no-var-requires
const initRDKitModule = require("@rdkit/rdkit") as RDKitLoader;

let instance: Promise<RDKitModule> | null = null;

/** Initialize the RDKit WASM module once and reuse it across calls. */
export function getRDKit(): Promise<RDKitModule> {
  if (instance === null) {
    instance = initRDKitModule();
  }
  return instance;
}

/**
 * Parse a SMILES string into a molecule, or return null when the toolkit
 * rejects it. RDKit throws on some malformed inputs and returns null on
 * others; both are normalized to null here.
 */
export function molFromSmiles(rdkit: RDKitModule, smiles: string): MolWithMaccs | null {
  if (!smiles.trim()) {
    return null;
  }
  try {
    const mol = rdkit.get_mol(smiles);
    return mol === null ? null : (mol as MolWithMaccs);
  } catch {
    return null;
  }
}
