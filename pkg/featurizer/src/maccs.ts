import type { MolWithMaccs } from "./rdkit";

export const MACCS_KEY_COUNT = 166;

/**
 * Human-readable names of the 166 MACCS structural keys, indexed by
 * key number - 1. These are the classic MDL key descriptions; the bit
 * values themselves come straight from the toolkit. Commas are replaced
 * with slashes so the names can serve as unquoted CSV column headers.
 */
const RAW_LABELS: readonly string[] = [
  "ISOTOPE",
  "103 < ATOMIC NO. < 256",
  "GROUP IVA/VA/VIA PERIODS 4-6 (Ge...)",
  "ACTINIDE",
  "GROUP IIIB/IVB (Sc...)",
  "LANTHANIDE",
  "GROUP VB/VIB/VIIB (V...)",
  "QAAA@1",
  "GROUP VIII (Fe...)",
  "GROUP IIA (ALKALINE EARTH)",
  "4M RING",
  "GROUP IB/IIB (Cu...)",
  "ON(C)C",
  "S-S",
  "OC(O)O",
  "QAA@1",
  "CTC",
  "GROUP IIIA (B...)",
  "7M RING",
  "SI",
  "C=C(Q)Q",
  "3M RING",
  "NC(O)O",
  "N-O",
  "NC(N)N",
  "C$=C($A)$A",
  "I",
  "QCH2Q",
  "P",
  "CQ(C)(C)A",
  "QX",
  "CSN",
  "NS",
  "CH2=A",
  "GROUP IA (ALKALI METAL)",
  "S HETEROCYCLE",
  "NC(O)N",
  "NC(C)N",
  "OS(O)O",
  "S-O",
  "CTN",
  "F",
  "QHAQH",
  "OTHER",
  "C=CN",
  "BR",
  "SAN",
  "OQ(O)O",
  "CHARGE",
  "C=C(C)C",
  "CSO",
  "NN",
  "QHAAAQH",
  "QHAAQH",
  "OSO",
  "ON(O)C",
  "O HETEROCYCLE",
  "QSQ",
  "Snot%A%A",
  "S=O",
  "AS(A)A",
  "A$A!A$A",
  "N=O",
  "A$A!S",
  "C%N",
  "CC(C)(C)A",
  "QS",
  "QHQH (&...)",
  "QQH",
  "QNQ",
  "NO",
  "OAAO",
  "S=A",
  "CH3ACH3",
  "A!N$A",
  "C=C(A)A",
  "NAN",
  "C=N",
  "NAAN",
  "NAAAN",
  "SA(A)A",
  "ACH2QH",
  "QAAAA@1",
  "NH2",
  "CN(C)C",
  "CH2QCH2",
  "X!A$A",
  "S",
  "OAAAO",
  "QHAACH2A",
  "QHAAACH2A",
  "OC(N)C",
  "QCH3",
  "QN",
  "NAAO",
  "5M RING",
  "NAAAO",
  "QAAAAA@1",
  "C=C",
  "ACH2N",
  "8M RING",
  "QO",
  "CL",
  "QHACH2A",
  "A$A($A)$A",
  "QA(Q)Q",
  "XA(A)A",
  "CH3AAACH2A",
  "ACH2O",
  "NCO",
  "NACH2A",
  "AA(A)(A)A",
  "Onot%A%A",
  "CH3CH2A",
  "CH3ACH2A",
  "CH3AACH2A",
  "NAO",
  "ACH2CH2A > 1",
  "N=A",
  "HETEROCYCLIC ATOM > 1 (&...)",
  "N HETEROCYCLE",
  "AN(A)A",
  "OCO",
  "QQ",
  "AROMATIC RING > 1",
  "A!O!A",
  "A$A!O > 1 (&...)",
  "ACH2AAACH2A",
  "ACH2AACH2A",
  "QQ > 1 (&...)",
  "QH > 1",
  "OACH2A",
  "A$A!N",
  "X (HALOGEN)",
  "Nnot%A%A",
  "O=A > 1",
  "HETEROCYCLE",
  "QCH2A > 1 (&...)",
  "OH",
  "O > 3 (&...)",
  "CH3 > 2 (&...)",
  "N > 1",
  "A$A!O",
  "Anot%A%Anot%A",
  "6M RING > 1",
  "O > 2",
  "ACH2CH2A",
  "AQ(A)A",
  "CH3 > 1",
  "A!A$A!A",
  "NH",
  "OC(C)C",
  "QCH2A",
  "C=O",
  "A!CH2!A",
  "NA(A)A",
  "C-O",
  "C-N",
  "O > 1",
  "CH3",
  "N",
  "AROMATIC",
  "6M RING",
  "O",
  "RING",
  "FRAGMENTS",
];

function uniquified(labels: readonly string[]): string[] {
  const seen = new Set<string>();
  return labels.map((label, idx) => {
    let name = label;
    if (seen.has(name)) {
      name = `${name}#${idx + 1}`;
    }
    seen.add(name);
    return name;
  });
}

/** Column names for the 166 keys, guaranteed unique and comma-free. */
export const MACCS_LABELS: readonly string[] = Object.freeze(uniquified(RAW_LABELS));

if (MACCS_LABELS.length !== MACCS_KEY_COUNT) {
  throw new Error(`MACCS label table has ${MACCS_LABELS.length} entries, expected 166`);
}

/** Key number (1-based) of the hydroxyl key, used by smoke checks. */
export const HYDROXYL_KEY = 139;
/** Key number (1-based) of the ring-membership key. */
export const RING_KEY = 165;

/** Column index of a key number in the 166-wide bit layout. */
export function keyColumn(keyNumber: number): number {
  if (keyNumber < 1 || keyNumber > MACCS_KEY_COUNT) {
    throw new Error(`MACCS key number ${keyNumber} outside 1..166`);
  }
  return keyNumber - 1;
}

/**
 * Extract the 166 MACCS key bits from a molecule. The toolkit emits 167
 * bits with an unused bit 0, which is dropped so column k holds key k+1.
 */
export function maccsBits(mol: MolWithMaccs): Uint8Array {
  const fp = mol.get_maccs_fp();
  if (fp.length !== MACCS_KEY_COUNT + 1) {
    throw new Error(`toolkit returned ${fp.length} MACCS bits, expected 167`);
  }
  const bits = new Uint8Array(MACCS_KEY_COUNT);
  for (let k = 1; k < fp.length; k++) {
    bits[k - 1] = fp[k] === "1" ? 1 : 0;
  }
  return bits;
}
