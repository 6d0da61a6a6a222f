export {
  JobError,
  datasetCsv,
  featurizeSmiles,
  parseSmilesFile,
  writeDatasetCsv,
} from "./featurize";
export type {
  DatasetRow,
  FeaturizeResult,
  SkippedRecord,
  SmilesRecord,
} from "./featurize";
export {
  HYDROXYL_KEY,
  MACCS_KEY_COUNT,
  MACCS_LABELS,
  RING_KEY,
  keyColumn,
  maccsBits,
} from "./maccs";
export { QM9_PROPERTIES, extractQm9Targets, parseQm9Record, qm9SmilesRecords, readQm9Records } from "./qm9";
export type { Qm9Record } from "./qm9";
export { getRDKit, molFromSmiles } from "./rdkit";
export { readTarEntries } from "./tar";
